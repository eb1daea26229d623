#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "sfbow/universe_builder.hpp"

namespace sfbow {

std::string_view to_string(UniverseMethod method) {
  switch (method) {
    case UniverseMethod::identity:
      return "identity";
    case UniverseMethod::pca:
      return "pca";
    case UniverseMethod::kmeans:
      return "kmeans";
    case UniverseMethod::spherical_kmeans:
      return "spherical_kmeans";
    case UniverseMethod::dbscan:
      return "dbscan";
  }
  return "unknown";
}

namespace {

constexpr char kMagic[4] = {'S', 'F', 'B', 'W'};
constexpr std::uint16_t kVersion = 1;

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t fingerprint(const PointMatrix& m, UniverseMethod method) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto tag = static_cast<std::uint8_t>(method);
  h = fnv1a(h, &tag, 1);
  std::uint64_t shape[2] = {static_cast<std::uint64_t>(m.rows()), static_cast<std::uint64_t>(m.cols())};
  h = fnv1a(h, shape, sizeof(shape));
  return fnv1a(h, m.data(), static_cast<std::size_t>(m.size()) * sizeof(double));
}

template <typename T>
void put(std::string& out, T value) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.append(reinterpret_cast<const char*>(bytes), sizeof(T));
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  template <typename T>
  T get() {
    need(sizeof(T));
    unsigned char raw[sizeof(T)];
    std::memcpy(raw, bytes_.data() + pos_, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(raw, raw + sizeof(T));
    pos_ += sizeof(T);
    T value;
    std::memcpy(&value, raw, sizeof(T));
    return value;
  }

  std::string_view take(std::size_t n) {
    need(n);
    auto out = bytes_.substr(pos_, n);
    pos_ += n;
    return out;
  }

  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (remaining() < n) throw FormatError("universe file truncated");
  }
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

UniverseMatrix::UniverseMatrix(PointMatrix matrix, UniverseMethod method, std::string source,
                               nlohmann::json params)
    : matrix_(std::move(matrix)),
      method_(method),
      source_(std::move(source)),
      params_(std::move(params)) {
  if (matrix_.rows() == 0 || matrix_.cols() == 0)
    throw std::invalid_argument("universe matrix must be at least 1x1");
  if (!matrix_.allFinite()) throw std::invalid_argument("universe matrix has non-finite entries");
  if (method_ == UniverseMethod::identity &&
      (matrix_.rows() != matrix_.cols() || matrix_ != PointMatrix::Identity(matrix_.rows(), matrix_.cols())))
    throw std::invalid_argument("identity universe must be the exact identity matrix");
  if (!params_.is_object()) throw std::invalid_argument("universe params must be a JSON object");
  id_ = fingerprint(matrix_, method_);
}

std::string serialize_universe(const UniverseMatrix& universe) {
  std::string out(kMagic, sizeof(kMagic));
  put<std::uint16_t>(out, kVersion);
  put<std::uint8_t>(out, static_cast<std::uint8_t>(universe.method()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(universe.size()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(universe.dim()));
  nlohmann::json meta = {{"source", universe.source()}, {"params", universe.params()}};
  std::string json = meta.dump();
  put<std::uint32_t>(out, static_cast<std::uint32_t>(json.size()));
  out += json;
  out.reserve(out.size() + universe.size() * universe.dim() * sizeof(float));
  const PointMatrix& m = universe.matrix();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) put<float>(out, static_cast<float>(m(i, j)));
  return out;
}

UniverseMatrix deserialize_universe(std::string_view bytes) {
  Reader in(bytes);
  if (in.take(4) != std::string_view(kMagic, 4)) throw FormatError("bad universe magic");
  auto version = in.get<std::uint16_t>();
  if (version != kVersion) throw FormatError("unsupported universe version " + std::to_string(version));
  auto tag = in.get<std::uint8_t>();
  if (tag > static_cast<std::uint8_t>(UniverseMethod::dbscan))
    throw FormatError("unknown universe method tag " + std::to_string(tag));
  auto rows = in.get<std::uint32_t>();
  auto cols = in.get<std::uint32_t>();
  if (rows == 0 || cols == 0) throw FormatError("universe has zero size");
  auto json_len = in.get<std::uint32_t>();
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(in.take(json_len));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad universe params block: ") + e.what());
  }
  if (!meta.is_object() || !meta.contains("source") || !meta.contains("params"))
    throw FormatError("universe params block lacks source/params");

  std::uint64_t count = std::uint64_t{rows} * cols;
  if (in.remaining() != count * sizeof(float)) {
    throw FormatError(in.remaining() < count * sizeof(float) ? "universe file truncated"
                                                            : "trailing bytes after universe matrix");
  }
  PointMatrix matrix(rows, cols);
  for (std::uint32_t i = 0; i < rows; ++i)
    for (std::uint32_t j = 0; j < cols; ++j) matrix(i, j) = in.get<float>();
  try {
    return UniverseMatrix(std::move(matrix), static_cast<UniverseMethod>(tag),
                          meta["source"].get<std::string>(), meta["params"]);
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("invalid universe contents: ") + e.what());
  }
}

void save_universe(const UniverseMatrix& universe, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write universe file: " + path.string());
  std::string bytes = serialize_universe(universe);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write failed: " + path.string());
}

UniverseMatrix load_universe(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open universe file: " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize_universe(bytes);
}

}  // namespace sfbow
