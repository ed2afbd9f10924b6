#include "gcrlab/field_dump.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "gcrlab/errors.hpp"

namespace gcr {
namespace {

constexpr char kMagic[4] = {'G', 'C', 'R', 'F'};

template <class T>
void put(std::string& buf, T value) {
  static_assert(std::endian::native == std::endian::little, "big-endian hosts are not supported");
  char raw[sizeof(T)];
  std::memcpy(raw, &value, sizeof(T));
  buf.append(raw, sizeof(T));
}

void put_string(std::string& buf, const std::string& s) {
  put<std::uint32_t>(buf, static_cast<std::uint32_t>(s.size()));
  buf += s;
}

class Reader {
 public:
  Reader(std::string data, std::string name) : data_(std::move(data)), name_(std::move(name)) {}

  template <class T>
  T get() {
    need(sizeof(T));
    T value;
    std::memcpy(&value, data_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }
  std::string get_string() {
    const auto n = get<std::uint32_t>();
    need(n);
    std::string s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::string_view bytes(std::size_t n) {
    need(n);
    std::string_view v(data_.data() + pos_, n);
    pos_ += n;
    return v;
  }
  std::size_t remaining() const { return data_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (data_.size() - pos_ < n) throw IoError("truncated field dump: " + name_);
  }
  std::string data_;
  std::string name_;
  std::size_t pos_ = 0;
};

}  // namespace

void write_field_dump(const std::filesystem::path& path, const ImmersionFields& f,
                      const nlohmann::json& extra) {
  const Grid& grid = f.grid();
  const int d = grid.dimension();
  std::string buf(kMagic, 4);
  put<std::uint32_t>(buf, kFieldDumpVersion);
  put<std::uint32_t>(buf, static_cast<std::uint32_t>(d));
  put<std::uint32_t>(buf, static_cast<std::uint32_t>(f.codimension()));
  for (int i = 0; i < d; ++i) put<std::uint32_t>(buf, static_cast<std::uint32_t>(grid.resolution(i)));
  for (int i = 0; i < d; ++i) put<double>(buf, grid.length(i));
  put_string(buf, f.h.layout().signature());
  put_string(buf, f.kappa.layout().signature());
  const int hs = f.h.layout().num_slots();
  const int ks = f.kappa.layout().num_slots();
  for (std::size_t node = 0; node < grid.num_nodes(); ++node) {
    for (int s = 0; s < hs; ++s) put<double>(buf, f.h.slot(s)[node]);
    for (int s = 0; s < ks; ++s) put<double>(buf, f.kappa.slot(s)[node]);
  }

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open field dump for writing: " + path.string());
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw IoError("failed writing field dump: " + path.string());

  nlohmann::json side = {
      {"format", "gcrf"},
      {"version", kFieldDumpVersion},
      {"dimension", d},
      {"codimension", f.codimension()},
      {"resolution", grid.spec().resolution},
      {"box", grid.spec().lengths},
      {"h_signature", f.h.layout().signature()},
      {"kappa_signature", f.kappa.layout().signature()},
      {"h_components", hs},
      {"kappa_components", ks},
      {"byte_order", "little"},
      {"node_order", "row-major, last axis fastest"},
  };
  for (const auto& [key, value] : extra.items()) side[key] = value;
  std::filesystem::path side_path = path;
  side_path += ".json";
  std::ofstream sout(side_path, std::ios::trunc);
  if (!sout) throw IoError("cannot open sidecar for writing: " + side_path.string());
  sout << side.dump(2) << '\n';
  if (!sout) throw IoError("failed writing sidecar: " + side_path.string());
}

FieldDump read_field_dump(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open field dump: " + path.string());
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  Reader r(std::move(data), path.string());
  if (r.bytes(4) != std::string_view(kMagic, 4)) throw IoError("not a field dump (bad magic): " + path.string());
  const auto version = r.get<std::uint32_t>();
  if (version != kFieldDumpVersion) {
    throw IoError("unsupported field dump version " + std::to_string(version) + ": " + path.string());
  }
  const auto d = static_cast<int>(r.get<std::uint32_t>());
  const auto n_co = static_cast<int>(r.get<std::uint32_t>());
  if (d < 1 || d > 8 || n_co < 1 || n_co > 64) throw IoError("implausible field dump header: " + path.string());
  GridSpec spec;
  spec.dimension = d;
  for (int i = 0; i < d; ++i) spec.resolution.push_back(static_cast<int>(r.get<std::uint32_t>()));
  for (int i = 0; i < d; ++i) spec.lengths.push_back(r.get<double>());
  const std::string hsig = r.get_string();
  const std::string ksig = r.get_string();

  GridPtr grid;
  try {
    grid = build_grid(spec);
  } catch (const ConfigError& e) {
    throw IoError(std::string("field dump has an invalid grid: ") + e.what());
  }
  FieldDump dump{spec, ImmersionFields::zero(grid, n_co)};
  ImmersionFields& f = dump.fields;
  if (hsig != f.h.layout().signature() || ksig != f.kappa.layout().signature()) {
    throw IoError("field dump index signatures do not match (" + hsig + ", " + ksig + "): " + path.string());
  }
  const int hs = f.h.layout().num_slots();
  const int ks = f.kappa.layout().num_slots();
  const std::size_t expected = grid->num_nodes() * static_cast<std::size_t>(hs + ks) * sizeof(double);
  if (r.remaining() != expected) throw IoError("field dump body has the wrong size: " + path.string());
  for (std::size_t node = 0; node < grid->num_nodes(); ++node) {
    for (int s = 0; s < hs; ++s) f.h.slot(s)[node] = r.get<double>();
    for (int s = 0; s < ks; ++s) f.kappa.slot(s)[node] = r.get<double>();
  }
  return dump;
}

}  // namespace gcr
