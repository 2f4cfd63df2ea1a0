#include "color/nn/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace color::nn {

namespace {

constexpr std::uint32_t kMaxLayers = 64;
constexpr std::uint32_t kMaxWidth = 1u << 20;

template <typename U>
void put_le(std::string& out, U value) {
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    out.push_back(static_cast<char>((value >> (8 * i)) & 0xFF));
  }
}

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}

  template <typename U>
  U get_le(const char* what) {
    if (bytes_.size() - pos_ < sizeof(U)) throw FormatError(std::string("checkpoint truncated while reading ") + what);
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) {
      v |= static_cast<U>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += sizeof(U);
    return v;
  }

  float get_f32() { return std::bit_cast<float>(get_le<std::uint32_t>("parameters")); }

  void expect_magic() {
    if (bytes_.size() < sizeof kCheckpointMagic ||
        std::memcmp(bytes_.data(), kCheckpointMagic, sizeof kCheckpointMagic) != 0) {
      throw FormatError("not a checkpoint: bad magic bytes");
    }
    pos_ = sizeof kCheckpointMagic;
  }

  bool at_end() const { return pos_ == bytes_.size(); }

 private:
  const std::string& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string serialize(const NetworkParams& params) {
  std::string out(kCheckpointMagic, sizeof kCheckpointMagic);
  put_le<std::uint32_t>(out, kCheckpointFormat);
  const Shape shape = params.shape();
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(params.layers.size()));
  for (int s : shape) put_le<std::uint32_t>(out, static_cast<std::uint32_t>(s));
  params.for_each([&](const float& v) { put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(v)); });
  put_le<std::uint64_t>(out, params.version);
  return out;
}

NetworkParams deserialize(const std::string& bytes) {
  Reader in(bytes);
  in.expect_magic();
  const auto format = in.get_le<std::uint32_t>("format version");
  if (format != kCheckpointFormat) throw FormatError("unsupported checkpoint format " + std::to_string(format));
  const auto n_layers = in.get_le<std::uint32_t>("layer count");
  if (n_layers == 0 || n_layers > kMaxLayers) throw FormatError("implausible layer count " + std::to_string(n_layers));
  Shape shape;
  for (std::uint32_t i = 0; i <= n_layers; ++i) {
    const auto s = in.get_le<std::uint32_t>("layer sizes");
    if (s == 0 || s > kMaxWidth) throw FormatError("implausible layer size " + std::to_string(s));
    shape.push_back(static_cast<int>(s));
  }
  auto params = NetworkParams::zeros(shape);
  params.for_each([&](float& v) { v = in.get_f32(); });
  params.version = in.get_le<std::uint64_t>("version");
  if (!in.at_end()) throw FormatError("trailing bytes after checkpoint");
  return params;
}

NetworkParams deserialize(const std::string& bytes, const Shape& expected) {
  auto params = deserialize(bytes);
  if (params.shape() != expected) throw FormatError("checkpoint shape does not match the expected network");
  return params;
}

void save_checkpoint(const std::filesystem::path& path, const NetworkParams& params) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot write checkpoint " + path.string());
    const auto bytes = serialize(params);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw FormatError("failed writing checkpoint " + path.string());
  }
  std::filesystem::rename(tmp, path);
}

NetworkParams load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open checkpoint " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return deserialize(ss.str());
}

}  // namespace color::nn
