#include <bit>
#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "mhdlab/errors.hpp"
#include "mhdlab/io.hpp"

static_assert(std::endian::native == std::endian::little,
              "snapshot I/O assumes a little-endian host");

namespace mhdlab {

namespace {

template <class T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is, const char* what) {
  T v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof(T)))
    throw FormatError(std::string("truncated snapshot header (") + what + ")");
  return v;
}

std::string get_bytes(std::istream& is, std::size_t n, const char* what) {
  std::string s(n, '\0');
  if (n && !is.read(s.data(), static_cast<std::streamsize>(n)))
    throw FormatError(std::string("truncated snapshot header (") + what + ")");
  return s;
}

}  // namespace

void write_snapshot_data(const SnapshotData& d, const std::string& path) {
  const std::size_t count = static_cast<std::size_t>(d.n) * d.n * d.n;
  if (d.names.size() != d.fields.size()) throw FormatError("field names and arrays differ in number");
  for (const auto& f : d.fields)
    if (f.size() != count) throw FormatError("snapshot field has the wrong length");
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error("cannot open " + path + " for writing");
  os.write("MHDW", 4);
  put<std::uint16_t>(os, d.major);
  put<std::uint16_t>(os, d.minor);
  put<std::uint32_t>(os, d.n);
  put<double>(os, d.length);
  put<double>(os, d.time);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(d.names.size()));
  for (const auto& s : d.names) {
    put<std::uint16_t>(os, static_cast<std::uint16_t>(s.size()));
    os.write(s.data(), static_cast<std::streamsize>(s.size()));
  }
  put<std::uint32_t>(os, static_cast<std::uint32_t>(d.metadata.size()));
  os.write(d.metadata.data(), static_cast<std::streamsize>(d.metadata.size()));
  for (const auto& f : d.fields)
    os.write(reinterpret_cast<const char*>(f.data()),
             static_cast<std::streamsize>(f.size() * sizeof(double)));
  if (!os) throw Error("write failed: " + path);
}

SnapshotData read_snapshot_data(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path);
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, "MHDW", 4) != 0)
    throw FormatError("not an MHDW snapshot: " + path);
  SnapshotData d;
  d.major = get<std::uint16_t>(is, "major");
  d.minor = get<std::uint16_t>(is, "minor");
  if (d.major != kSnapshotMajor)
    throw FormatError("unsupported snapshot major version " + std::to_string(d.major));
  if (d.minor > kSnapshotMinor)
    d.warning = "snapshot minor version " + std::to_string(d.minor) +
                " is newer than " + std::to_string(kSnapshotMinor) + "; reading anyway";
  d.n = get<std::uint32_t>(is, "N");
  d.length = get<double>(is, "L");
  d.time = get<double>(is, "time");
  const auto count = get<std::uint32_t>(is, "field count");
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto len = get<std::uint16_t>(is, "name length");
    d.names.push_back(get_bytes(is, len, "name"));
  }
  const auto mlen = get<std::uint32_t>(is, "metadata length");
  d.metadata = get_bytes(is, mlen, "metadata");
  const std::size_t cells = static_cast<std::size_t>(d.n) * d.n * d.n;
  for (std::uint32_t i = 0; i < count; ++i) {
    std::vector<double> f(cells);
    if (!is.read(reinterpret_cast<char*>(f.data()),
                 static_cast<std::streamsize>(cells * sizeof(double))))
      throw FormatError("truncated snapshot payload: " + path);
    d.fields.push_back(std::move(f));
  }
  if (is.peek() != std::char_traits<char>::eof())
    throw FormatError("trailing bytes after snapshot payload: " + path);
  return d;
}

namespace {

const char* kVec[3] = {"x", "y", "z"};

}  // namespace

void write_snapshot(const SimState& s, const Grid& g, const std::string& path) {
  SnapshotData d;
  d.n = static_cast<std::uint32_t>(g.n());
  d.length = g.length();
  d.time = s.t;
  auto add = [&](const std::string& name, const ScalarField& f) {
    d.names.push_back(name);
    d.fields.push_back(f.is_zero() ? std::vector<double>(g.size(), 0.0) : f.physical());
  };
  auto addv = [&](const std::string& name, const VectorField& v) {
    for (int a = 0; a < 3; ++a) {
      const ScalarField f = v.is_zero() ? ScalarField(g) : v[a];
      add(name + "_" + kVec[a], f);
    }
  };
  addv("u", s.u);
  addv("b", s.b);
  addv("v", s.v);
  addv("c", s.c);
  add("p", s.p);
  add("q", s.q);
  for (const auto* T : {&s.F, &s.G}) {
    if (T->is_zero()) continue;
    const std::string base = T == &s.F ? "F" : "G";
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        if (!T->at(i, j).is_zero()) add(base + "_" + kVec[i] + kVec[j], T->at(i, j));
  }
  write_snapshot_data(d, path);
}

SimState read_snapshot(const std::string& path, std::string* warning) {
  SnapshotData d = read_snapshot_data(path);
  if (warning) *warning = d.warning;
  const Grid g(static_cast<int>(d.n), d.length);
  SimState s;
  s.t = d.time;
  s.u = VectorField(g);
  s.b = VectorField(g);
  s.v = VectorField(g);
  s.c = VectorField(g);
  s.p = ScalarField(g);
  s.q = ScalarField(g);
  s.F = TensorField(g);
  s.G = TensorField(g);
  for (std::size_t k = 0; k < d.names.size(); ++k) {
    const std::string& nm = d.names[k];
    ScalarField f = ScalarField::from_physical(g, std::move(d.fields[k]));
    auto axis = [&](char c) { return c == 'x' ? 0 : c == 'y' ? 1 : c == 'z' ? 2 : -1; };
    if (nm == "p") {
      s.p = std::move(f);
    } else if (nm == "q") {
      s.q = std::move(f);
    } else if (nm.size() == 3 && nm[1] == '_' && axis(nm[2]) >= 0 &&
               std::string("ubvc").find(nm[0]) != std::string::npos) {
      VectorField* v = nm[0] == 'u' ? &s.u : nm[0] == 'b' ? &s.b : nm[0] == 'v' ? &s.v : &s.c;
      (*v)[axis(nm[2])] = std::move(f);
    } else if (nm.size() == 4 && nm[1] == '_' && (nm[0] == 'F' || nm[0] == 'G') &&
               axis(nm[2]) >= 0 && axis(nm[3]) >= 0) {
      TensorField* T = nm[0] == 'F' ? &s.F : &s.G;
      T->at(axis(nm[2]), axis(nm[3])) = std::move(f);
    } else {
      throw FormatError("unknown snapshot field: " + nm);
    }
  }
  return s;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_ledgers(const std::vector<EnergyLedger>& rows, const std::string& path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw Error("cannot open " + path + " for writing");
  os << "t_a,t_b";
  for (const char* n : kLedgerTerms) os << ',' << n;
  os << ",slack\n";
  for (const auto& r : rows) {
    os << format_double(r.t_a) << ',' << format_double(r.t_b);
    for (double x : r.terms) os << ',' << format_double(x);
    os << ',' << format_double(r.slack) << '\n';
  }
  if (!os) throw Error("write failed: " + path);
}

std::vector<EnergyLedger> read_ledgers(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open " + path);
  std::string line;
  if (!std::getline(is, line)) throw FormatError("ledger file has no header: " + path);
  std::vector<EnergyLedger> out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<double> v;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) v.push_back(std::strtod(cell.c_str(), nullptr));
    if (v.size() != 15) throw FormatError("ledger row has " + std::to_string(v.size()) + " columns");
    EnergyLedger L;
    L.t_a = v[0];
    L.t_b = v[1];
    for (int i = 0; i < 12; ++i) L.terms[i] = v[2 + i];
    L.slack = v[14];
    out.push_back(L);
  }
  return out;
}

}  // namespace mhdlab
