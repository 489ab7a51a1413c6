#include "cohomlab/serialization.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cohomlab/errors.hpp"

namespace cohomlab {

namespace {

static_assert(std::endian::native == std::endian::little,
              "binary container assumes a little-endian host");

template <class T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}

  template <class T>
  T get() {
    if (pos_ + sizeof(T) > bytes_.size()) throw FormatError("truncated function container");
    T v;
    std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  const std::string& bytes_;
  std::size_t pos_ = 0;
};

nlohmann::json header_of(const SampledFunction& f) {
  nlohmann::json axes = nlohmann::json::array();
  for (const auto& g : f.grids())
    axes.push_back({{"lo", g.lo}, {"hi", g.hi}, {"n", g.n}, {"offset", g.offset},
                    {"weight", to_string(g.weight)}});
  return {{"format", "cohomlab-function"}, {"dims", f.dims()}, {"axes", axes},
          {"payload", "interleaved re/im f64, row-major, little-endian"}};
}

}  // namespace

std::string encode_binary(const SampledFunction& f) {
  std::string out;
  out.reserve(4 + f.dims() * 29 + f.size() * 16);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(f.dims()));
  for (const auto& g : f.grids()) {
    put<double>(out, g.lo);
    put<double>(out, g.hi);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(g.n));
    put<double>(out, g.offset);
    put<std::uint8_t>(out, static_cast<std::uint8_t>(g.weight));
  }
  for (const auto& v : f.values()) {
    put<double>(out, v.real());
    put<double>(out, v.imag());
  }
  return out;
}

SampledFunction decode_binary(const std::string& bytes) {
  Reader r(bytes);
  const auto dims = r.get<std::uint32_t>();
  if (dims < 1 || dims > 3) throw FormatError("function container has invalid dimension count");
  std::vector<Grid1D> grids;
  std::size_t total = 1;
  for (std::uint32_t a = 0; a < dims; ++a) {
    Grid1D g;
    g.lo = r.get<double>();
    g.hi = r.get<double>();
    g.n = r.get<std::uint32_t>();
    g.offset = r.get<double>();
    const auto w = r.get<std::uint8_t>();
    if (w > 1) throw FormatError("function container has unknown measure tag");
    g.weight = static_cast<Measure>(w);
    grids.push_back(g);
    total *= g.n;
  }
  std::vector<Complex> values(total);
  for (auto& v : values) {
    const double re = r.get<double>();
    const double im = r.get<double>();
    v = {re, im};
  }
  if (!r.done()) throw FormatError("trailing bytes after function payload");
  try {
    return SampledFunction(std::move(grids), std::move(values));
  } catch (const DomainError& e) {
    throw FormatError(std::string("invalid function container: ") + e.what());
  }
}

std::string header_json(const SampledFunction& f) { return header_of(f).dump(2); }

void save_function(const SampledFunction& f, const std::filesystem::path& path) {
  std::ofstream bin(path, std::ios::binary);
  if (!bin) throw FormatError("cannot open " + path.string() + " for writing");
  const auto bytes = encode_binary(f);
  bin.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  std::ofstream side(path.string() + ".json");
  if (!side) throw FormatError("cannot write sidecar for " + path.string());
  side << header_json(f) << '\n';
}

SampledFunction load_function(const std::filesystem::path& path) {
  std::ifstream bin(path, std::ios::binary);
  if (!bin) throw FormatError("cannot open " + path.string());
  std::ostringstream ss;
  ss << bin.rdbuf();
  auto f = decode_binary(ss.str());
  const std::filesystem::path sidecar = path.string() + ".json";
  if (std::filesystem::exists(sidecar)) {
    std::ifstream side(sidecar);
    nlohmann::json j;
    try {
      side >> j;
    } catch (const nlohmann::json::exception& e) {
      throw FormatError("malformed sidecar: " + std::string(e.what()));
    }
    if (j.value("axes", nlohmann::json()) != header_of(f)["axes"])
      throw FormatError("sidecar header disagrees with " + path.string());
  }
  return f;
}

}  // namespace cohomlab
