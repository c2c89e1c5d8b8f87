#include <cstring>
#include <cstdio>

#include "assemai/nnet.hpp"
#include "assemai/raster_io.hpp"

namespace assemai {

namespace {

constexpr char kMagic[8] = {'A', 'S', 'S', 'E', 'M', 'A', 'I', '1'};
constexpr const char* kSpecTensor = "model.spec";

class Writer {
 public:
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    out.insert(out.end(), b, b + n);
  }
  template <class T>
  void le(T v) {
    std::uint64_t bits = 0;
    std::memcpy(&bits, &v, sizeof(T));
    std::uint8_t b[sizeof(T)];
    for (std::size_t i = 0; i < sizeof(T); ++i) b[i] = static_cast<std::uint8_t>(bits >> (8 * i));
    out.insert(out.end(), b, b + sizeof(T));
  }
  std::vector<std::uint8_t> out;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> b) : buf(b) {}
  void need(std::size_t n, const char* what) const {
    if (buf.size() - pos < n) throw FormatError(std::string("truncated model container while reading ") + what, pos);
  }
  template <class T>
  T le(const char* what) {
    need(sizeof(T), what);
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) bits |= static_cast<std::uint64_t>(buf[pos + i]) << (8 * i);
    pos += sizeof(T);
    T v;
    std::memcpy(&v, &bits, sizeof(T));
    return v;
  }
  std::string text(std::size_t n, const char* what) {
    need(n, what);
    std::string s(reinterpret_cast<const char*>(buf.data() + pos), n);
    pos += n;
    return s;
  }
  std::span<const std::uint8_t> buf;
  std::size_t pos = 0;
};

void put_tensor(Writer& w, std::string_view name, const Tensor& t) {
  w.le<std::uint32_t>(static_cast<std::uint32_t>(name.size()));
  w.bytes(name.data(), name.size());
  w.le<std::uint32_t>(static_cast<std::uint32_t>(t.shape.size()));
  for (int d : t.shape) w.le<std::uint64_t>(static_cast<std::uint64_t>(d));
  for (double v : t.data) w.le<double>(v);
}

struct RawTensor {
  std::string name;
  std::vector<int> shape;
  std::vector<double> values;
  std::size_t offset;
};

RawTensor get_tensor(Reader& r) {
  RawTensor t;
  t.offset = r.pos;
  const auto name_len = r.le<std::uint32_t>("tensor name length");
  if (name_len > 256) throw FormatError("implausible tensor name length", t.offset);
  t.name = r.text(name_len, "tensor name");
  const std::size_t rank_at = r.pos;
  const auto rank = r.le<std::uint32_t>("tensor rank");
  if (rank == 0 || rank > 8) throw FormatError("tensor rank must be 1..8", rank_at);
  std::size_t count = 1;
  for (std::uint32_t i = 0; i < rank; ++i) {
    const std::size_t at = r.pos;
    const auto d = r.le<std::uint64_t>("tensor dimension");
    if (d == 0 || d > (1u << 30)) throw FormatError("invalid tensor dimension", at);
    t.shape.push_back(static_cast<int>(d));
    count *= d;
  }
  r.need(count * 8, "tensor values");
  t.values.resize(count);
  for (double& v : t.values) v = r.le<double>("tensor values");
  return t;
}

}  // namespace

std::vector<std::uint8_t> encode_model(const Model& model) {
  const ModelSpec& s = model.spec();
  Writer w;
  std::size_t values = 7;
  for (const Tensor& t : model.params()) values += t.data.size();
  w.out.reserve(64 * (model.params().size() + 1) + 8 * values);
  w.bytes(kMagic, sizeof kMagic);
  w.le<std::uint32_t>(static_cast<std::uint32_t>(1 + model.params().size()));
  put_tensor(w, kSpecTensor,
             Tensor({7}, {double(s.in_channels), double(s.in_height), double(s.in_width), double(s.conv1_filters),
                          double(s.conv2_filters), double(s.hidden), double(s.classes)}));
  for (std::size_t i = 0; i < model.params().size(); ++i) put_tensor(w, kParamNames[i], model.params()[i]);
  return std::move(w.out);
}

Model decode_model(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  if (bytes.size() < sizeof kMagic || std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0) {
    throw FormatError("not a model container (bad magic)", 0);
  }
  r.pos = sizeof kMagic;
  const std::size_t count_at = r.pos;
  const auto count = r.le<std::uint32_t>("tensor count");
  if (count != 1 + kParamNames.size()) {
    throw FormatError("expected " + std::to_string(1 + kParamNames.size()) + " tensors, found " +
                      std::to_string(count), count_at);
  }
  const RawTensor spec_t = get_tensor(r);
  if (spec_t.name != kSpecTensor || spec_t.values.size() != 7) {
    throw FormatError("first tensor must be " + std::string(kSpecTensor) + " with 7 values", spec_t.offset);
  }
  ModelSpec s;
  int* fields[] = {&s.in_channels, &s.in_height, &s.in_width, &s.conv1_filters, &s.conv2_filters, &s.hidden,
                   &s.classes};
  for (std::size_t i = 0; i < 7; ++i) {
    const double v = spec_t.values[i];
    if (!(v >= 1.0 && v <= 1e6) || v != static_cast<double>(static_cast<int>(v))) {
      throw FormatError("model.spec holds a non-integer or out-of-range field", spec_t.offset);
    }
    *fields[i] = static_cast<int>(v);
  }
  Model model = [&] {
    try {
      return Model(s);
    } catch (const InputError& e) {
      throw FormatError(std::string("model.spec: ") + e.what(), spec_t.offset);
    }
  }();
  for (std::size_t i = 0; i < kParamNames.size(); ++i) {
    RawTensor t = get_tensor(r);
    Tensor& p = model.params()[i];
    if (t.name != kParamNames[i]) {
      throw FormatError("expected tensor " + std::string(kParamNames[i]) + ", found " + t.name, t.offset);
    }
    if (t.shape != p.shape) throw FormatError("tensor " + t.name + " has the wrong shape for model.spec", t.offset);
    p.data = std::move(t.values);
  }
  if (r.pos != bytes.size()) {
    throw FormatError(std::to_string(bytes.size() - r.pos) + " unexpected trailing bytes after the last tensor", r.pos);
  }
  return model;
}

void save_model(const Model& model, const std::filesystem::path& path) { write_file_bytes(path, encode_model(model)); }

Model load_model(const std::filesystem::path& path) { return decode_model(read_file_bytes(path)); }

std::string model_id(const Model& model) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::uint8_t b : encode_model(model)) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace assemai
