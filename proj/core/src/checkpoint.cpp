#include "treetag/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "treetag/errors.hpp"

namespace treetag {
namespace {

constexpr std::array<char, 8> kMagic = {'T', 'T', 'A', 'G', 'C', 'K', 'P', 'T'};

template <typename U>
void put_le(std::ostream& out, U value) {
  std::array<char, sizeof(U)> bytes;
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    bytes[i] = static_cast<char>((value >> (8 * i)) & 0xFF);
  }
  out.write(bytes.data(), bytes.size());
}

template <typename U>
U get_le(std::istream& in) {
  std::array<unsigned char, sizeof(U)> bytes;
  in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (!in) throw ConfigError("checkpoint truncated");
  U value = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) value |= U(bytes[i]) << (8 * i);
  return value;
}

void put_string(std::ostream& out, const std::string& s) {
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string get_string(std::istream& in) {
  const auto len = get_le<std::uint32_t>(in);
  if (len > (1u << 20)) throw ConfigError("checkpoint string too long");
  std::string s(len, '\0');
  in.read(s.data(), len);
  if (!in) throw ConfigError("checkpoint truncated");
  return s;
}

}  // namespace

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt) {
  ckpt.params.validate();
  if (ckpt.params.dims() != ckpt.dims) throw ConfigError("checkpoint dims disagree with params");
  if (static_cast<int>(ckpt.tags.size()) != ckpt.dims.num_tags) {
    throw ConfigError("checkpoint tag list disagrees with |Y|");
  }
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(out, Checkpoint::kVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(ckpt.dims.embedding_dim));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(ckpt.dims.hidden));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(ckpt.dims.num_tags));
  put_le<std::uint64_t>(out, ckpt.seed);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(ckpt.tags.size()));
  for (const std::string& t : ckpt.tags) put_string(out, t);

  std::uint32_t n_tensors = 0;
  ckpt.params.for_each_tensor([&](const std::string&, auto, auto, auto) { ++n_tensors; });
  put_le<std::uint32_t>(out, n_tensors);
  ckpt.params.for_each_tensor([&](const std::string& name, auto data, auto rows, auto cols) {
    put_string(out, name);
    put_le<std::uint64_t>(out, static_cast<std::uint64_t>(rows));
    put_le<std::uint64_t>(out, static_cast<std::uint64_t>(cols));
    for (double v : data) put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
  });
  if (!out) throw ConfigError("failed writing checkpoint");
}

Checkpoint read_checkpoint(std::istream& in) {
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw ConfigError("not a checkpoint file (bad magic)");
  const auto version = get_le<std::uint32_t>(in);
  if (version != Checkpoint::kVersion) {
    throw ConfigError("unsupported checkpoint version " + std::to_string(version));
  }
  Checkpoint ckpt;
  ckpt.dims.embedding_dim = static_cast<int>(get_le<std::uint32_t>(in));
  ckpt.dims.hidden = static_cast<int>(get_le<std::uint32_t>(in));
  ckpt.dims.num_tags = static_cast<int>(get_le<std::uint32_t>(in));
  ckpt.dims.validate();
  ckpt.seed = get_le<std::uint64_t>(in);
  const auto n_tags = get_le<std::uint32_t>(in);
  if (static_cast<int>(n_tags) != ckpt.dims.num_tags) {
    throw ConfigError("checkpoint tag count disagrees with |Y|");
  }
  for (std::uint32_t i = 0; i < n_tags; ++i) ckpt.tags.push_back(get_string(in));

  ckpt.params = ModelParams(ckpt.dims);
  std::uint32_t expected = 0;
  ckpt.params.for_each_tensor([&](const std::string&, auto, auto, auto) { ++expected; });
  if (get_le<std::uint32_t>(in) != expected) throw ConfigError("checkpoint tensor count mismatch");

  ckpt.params.for_each_tensor([&](const std::string& name, auto data, auto rows, auto cols) {
    const std::string stored = get_string(in);
    if (stored != name) {
      throw ConfigError("checkpoint tensor '" + stored + "' where '" + name + "' expected");
    }
    const auto r = get_le<std::uint64_t>(in);
    const auto c = get_le<std::uint64_t>(in);
    if (r != static_cast<std::uint64_t>(rows) || c != static_cast<std::uint64_t>(cols)) {
      throw ConfigError("checkpoint tensor '" + name + "' has wrong shape");
    }
    for (double& v : data) v = std::bit_cast<double>(get_le<std::uint64_t>(in));
  });
  return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot open " + tmp.string() + " for writing");
    write_checkpoint(out, ckpt);
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open checkpoint " + path.string());
  return read_checkpoint(in);
}

}  // namespace treetag
