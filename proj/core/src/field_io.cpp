#include "chemostokes/field_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace chemostokes {

using nlohmann::json;

void write_le_doubles(std::ostream& os, std::span<const double> values) {
  std::vector<unsigned char> buf(values.size() * 8);
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::uint64_t bits = std::bit_cast<std::uint64_t>(values[i]);
    for (int b = 0; b < 8; ++b) buf[i * 8 + b] = static_cast<unsigned char>(bits >> (8 * b));
  }
  os.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
}

void read_le_doubles(std::istream& is, std::span<double> values) {
  std::vector<unsigned char> buf(values.size() * 8);
  is.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (static_cast<std::size_t>(is.gcount()) != buf.size())
    throw std::runtime_error("truncated float64 payload");
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(buf[i * 8 + b]) << (8 * b);
    values[i] = std::bit_cast<double>(bits);
  }
}

void write_fld(const std::filesystem::path& path, const FieldHeader& header,
               std::span<const double> values) {
  std::size_t expected = 1;
  for (int c : header.cells) expected *= static_cast<std::size_t>(c);
  if (expected != values.size())
    throw std::invalid_argument("write_fld: value count does not match header cells");
  nlohmann::ordered_json h = {{"name", header.name},   {"units", header.units},     {"dim", header.dim},
            {"cells", header.cells}, {"lengths", header.lengths}, {"time", header.time}};
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os << h.dump() << '\n';
  write_le_doubles(os, values);
  if (!os) throw std::runtime_error("write failed for " + path.string());
}

FldContents read_fld(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  std::getline(is, line);
  const json h = json::parse(line);
  FldContents out;
  out.header.name = h.at("name").get<std::string>();
  out.header.units = h.at("units").get<std::string>();
  out.header.dim = h.at("dim").get<int>();
  out.header.cells = h.at("cells").get<std::vector<int>>();
  out.header.lengths = h.at("lengths").get<std::vector<double>>();
  out.header.time = h.at("time").get<double>();
  std::size_t n = 1;
  for (int c : out.header.cells) n *= static_cast<std::size_t>(c);
  out.values.resize(n);
  read_le_doubles(is, out.values);
  return out;
}

namespace {

FieldHeader header_for(const GridSpec& g, const std::string& name, const std::string& units,
                       std::array<int, 3> shape, double time) {
  FieldHeader h;
  h.name = name;
  h.units = units;
  h.dim = g.dim();
  h.time = time;
  for (int a = 0; a < g.dim(); ++a) {
    h.cells.push_back(shape[a]);
    h.lengths.push_back(g.length(a));
  }
  return h;
}

}  // namespace

void write_scalar_fld(const std::filesystem::path& path, const std::string& name,
                      const std::string& units, const ScalarField& f, double time) {
  write_fld(path, header_for(f.grid(), name, units, f.grid().cell_shape(), time), f.values());
}

ScalarField read_scalar_fld(const std::filesystem::path& path) {
  auto contents = read_fld(path);
  const auto& h = contents.header;
  if (h.cells.size() != static_cast<std::size_t>(h.dim) || h.lengths.size() != h.cells.size())
    throw std::runtime_error(path.string() + ": header shape mismatch");
  std::array<int, 3> cells{1, 1, 1};
  std::array<double, 3> lengths{1.0, 1.0, 1.0};
  for (int a = 0; a < h.dim; ++a) {
    cells[a] = h.cells[a];
    lengths[a] = h.lengths[a];
  }
  ScalarField f(GridSpec(h.dim, cells, lengths));
  std::copy(contents.values.begin(), contents.values.end(), f.values().begin());
  return f;
}

void write_face_fld(const std::filesystem::path& path, const std::string& name,
                    const std::string& units, const FaceVectorField& F, int axis, double time) {
  write_fld(path, header_for(F.grid(), name, units, F.grid().face_shape(axis), time),
            F.component(axis));
}

}  // namespace chemostokes
