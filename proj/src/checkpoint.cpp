#include "bellrelax/checkpoint.hpp"

#include "bellrelax/error.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <vector>

namespace bellrelax {

namespace {

constexpr std::array<char, 8> kMagic{'B', 'B', 'B', 'C', 'K', 'P', 'T', '\0'};

template <typename T>
void put(std::vector<char>& out, T value) {
  std::array<char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  out.insert(out.end(), bytes.begin(), bytes.end());
}

class Reader {
 public:
  explicit Reader(std::vector<char> data) : data_(std::move(data)) {}

  template <typename T>
  T get(const char* what) {
    if (data_.size() - pos_ < sizeof(T))
      throw ValidationError(std::string("checkpoint truncated while reading ") + what,
                            "checkpoint");
    std::array<char, sizeof(T)> bytes;
    std::memcpy(bytes.data(), data_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    T value;
    std::memcpy(&value, bytes.data(), sizeof(T));
    return value;
  }

  std::size_t remaining() const { return data_.size() - pos_; }

 private:
  std::vector<char> data_;
  std::size_t pos_ = 0;
};

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ck) {
  const Eigen::Index n = static_cast<Eigen::Index>(ck.N) * ck.N;
  if (ck.psi.size() != n || ck.cumulative.rows() != n || ck.cumulative.cols() != n)
    throw ValidationError("checkpoint arrays do not match N", "checkpoint");

  std::vector<char> out;
  out.reserve(40 + 16 * n + 8 * n * n);
  out.insert(out.end(), kMagic.begin(), kMagic.end());
  put<std::uint32_t>(out, kCheckpointVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(ck.N));
  put<std::uint64_t>(out, static_cast<std::uint64_t>(ck.step));
  put<double>(out, ck.L);
  put<double>(out, ck.epsilon);
  for (Eigen::Index i = 0; i < n; ++i) {
    put<double>(out, ck.psi[i].real());
    put<double>(out, ck.psi[i].imag());
  }
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) put<double>(out, ck.cumulative(i, j));

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw ValidationError("cannot write checkpoint " + path.string(), "io");
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw ValidationError("failed writing checkpoint " + path.string(), "io");
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw ValidationError("cannot open checkpoint " + path.string(), "checkpoint");
  std::vector<char> data((std::istreambuf_iterator<char>(file)), std::istreambuf_iterator<char>());
  Reader in(std::move(data));

  std::array<char, 8> magic;
  for (char& c : magic) c = in.get<char>("magic");
  if (magic != kMagic) throw ValidationError("not a checkpoint file (bad magic)", "checkpoint");
  const auto version = in.get<std::uint32_t>("version");
  if (version != kCheckpointVersion)
    throw ValidationError("unsupported checkpoint version " + std::to_string(version) +
                              " (expected version " + std::to_string(kCheckpointVersion) + ")",
                          "checkpoint");

  Checkpoint ck;
  ck.N = static_cast<int>(in.get<std::uint32_t>("N"));
  ck.step = static_cast<std::int64_t>(in.get<std::uint64_t>("step"));
  ck.L = in.get<double>("L");
  ck.epsilon = in.get<double>("epsilon");
  if (ck.N < 2 || ck.N > 4096) throw ValidationError("checkpoint has implausible N", "checkpoint");

  const Eigen::Index n = static_cast<Eigen::Index>(ck.N) * ck.N;
  const std::size_t payload = static_cast<std::size_t>(16 * n + 8 * n * n);
  if (in.remaining() < payload)
    throw ValidationError("checkpoint truncated: expected " + std::to_string(payload) +
                              " payload bytes, found " + std::to_string(in.remaining()),
                          "checkpoint");
  ck.psi.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double re = in.get<double>("psi");
    const double im = in.get<double>("psi");
    ck.psi[i] = {re, im};
  }
  ck.cumulative.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) ck.cumulative(i, j) = in.get<double>("cumulative");
  if (in.remaining() != 0)
    throw ValidationError("checkpoint has trailing bytes", "checkpoint");
  return ck;
}

}  // namespace bellrelax
