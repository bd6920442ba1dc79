#pragma once

// Output formats.
//
// CSV: optional '#' comment lines, then the header row
//   t,E_basic,D_total,D_visc,D_mu1,D_lam1,D_cross,D_mu56,E_hs,D_hs,E_eta,D_eta,
//   h_max,h_l2,tangency_max,residual
// and one row per sample. Numbers use the shortest round-trip decimal form;
// absent values are empty fields.
//
// Snapshot (little-endian):
//   char[16]  "ELHSNAP\0" zero padded
//   u32       version (1)
//   u32       dim
//   u32       n
//   u32       component count (3 * dim)
//   f64       time
//   f64[...]  real-space samples, row-major per component, ordered
//             u_1..u_dim, d_1..d_dim, w_1..w_dim

#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "config.hpp"

namespace elh {

inline constexpr std::array<const char*, 16> kCsvColumns = {
    "t",     "E_basic", "D_total", "D_visc", "D_mu1", "D_lam1",       "D_cross",  "D_mu56",
    "E_hs",  "D_hs",    "E_eta",   "D_eta",  "h_max", "h_l2", "tangency_max", "residual"};

using CsvRow = std::array<std::optional<double>, kCsvColumns.size()>;

inline CsvRow to_row(const DiagnosticsRecord& r) {
  return {r.t,
          r.basic_energy,
          r.dissipation.total,
          r.dissipation.viscous,
          r.dissipation.mu1,
          r.dissipation.lambda1,
          r.dissipation.cross,
          r.dissipation.mu56,
          r.hs_energy,
          r.hs_dissipation,
          r.modified_energy,
          r.modified_dissipation,
          r.drift.h_max,
          r.drift.h_l2,
          r.drift.tangency_max,
          r.energy_residual};
}

inline std::string format_csv(const std::vector<CsvRow>& rows,
                              const std::vector<std::string>& comments = {}) {
  std::string out;
  for (const auto& c : comments) out += "# " + c + "\n";
  for (std::size_t i = 0; i < kCsvColumns.size(); ++i) {
    if (i) out += ',';
    out += kCsvColumns[i];
  }
  out += '\n';
  char buf[64];
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      if (row[i]) {
        auto r = std::to_chars(buf, buf + sizeof buf, *row[i]);
        out.append(buf, r.ptr);
      }
    }
    out += '\n';
  }
  return out;
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) fail(ErrorKind::Precondition, "cannot open '" + path + "' for writing");
  f << text;
  if (!f) fail(ErrorKind::Precondition, "write to '" + path + "' failed");
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(ErrorKind::Precondition, "cannot open '" + path + "'");
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

struct CsvTable {
  std::vector<std::string> comments;
  std::vector<CsvRow> rows;
};

/// Parses CSV text in the fixed schema; the header must match exactly.
inline CsvTable parse_csv(const std::string& text) {
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  bool header = false;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header && line[0] == '#') {
      t.comments.push_back(line.size() > 2 ? line.substr(2) : "");
      continue;
    }
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      fields.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (!header) {
      if (fields.size() != kCsvColumns.size()) {
        fail(ErrorKind::Precondition, "CSV header has " + std::to_string(fields.size()) +
                                          " columns, expected " +
                                          std::to_string(kCsvColumns.size()));
      }
      for (std::size_t i = 0; i < fields.size(); ++i) {
        if (fields[i] != kCsvColumns[i]) {
          fail(ErrorKind::Precondition, "CSV column " + std::to_string(i + 1) + " is '" +
                                            fields[i] + "', expected '" + kCsvColumns[i] + "'");
        }
      }
      header = true;
      continue;
    }
    if (fields.size() != kCsvColumns.size()) {
      fail(ErrorKind::Precondition, "CSV line " + std::to_string(lineno) + " has " +
                                        std::to_string(fields.size()) + " fields");
    }
    CsvRow row;
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (fields[i].empty()) continue;
      double x = 0.0;
      const char* b = fields[i].data();
      const char* e = b + fields[i].size();
      auto r = std::from_chars(b, e, x);
      if (r.ec != std::errc() || r.ptr != e) {
        fail(ErrorKind::Precondition, "CSV line " + std::to_string(lineno) + ", column " +
                                          kCsvColumns[i] + ": bad number '" + fields[i] + "'");
      }
      row[i] = x;
    }
    t.rows.push_back(row);
  }
  if (!header) fail(ErrorKind::Precondition, "CSV has no header row");
  return t;
}

inline std::size_t csv_column(const std::string& name) {
  for (std::size_t i = 0; i < kCsvColumns.size(); ++i)
    if (name == kCsvColumns[i]) return i;
  fail(ErrorKind::Precondition, "unknown CSV column '" + name + "'");
}

// ---------------------------------------------------------------------------
// Snapshots
// ---------------------------------------------------------------------------

inline constexpr char kSnapshotMagic[16] = {'E', 'L', 'H', 'S', 'N', 'A', 'P', '\0'};
inline constexpr std::uint32_t kSnapshotVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "snapshot I/O assumes a little-endian host");

struct Snapshot {
  int dim = 0;
  int n = 0;
  double t = 0.0;
  /// 3 * dim real-space components.
  RealField fields;
};

inline Snapshot make_snapshot(const State& s) {
  const Grid& g = s.u.grid;
  const int dim = g.dim();
  Snapshot snap;
  snap.dim = dim;
  snap.n = g.n();
  snap.t = s.t;
  snap.fields = RealField(g, 3 * dim);
  const RealField parts[3] = {inverse(s.u), inverse(s.d), inverse(s.w)};
  for (int f = 0; f < 3; ++f)
    for (int c = 0; c < dim; ++c) {
      auto src = parts[f].component(c);
      auto dst = snap.fields.component(f * dim + c);
      std::copy(src.begin(), src.end(), dst.begin());
    }
  return snap;
}

inline std::string encode_snapshot(const Snapshot& s) {
  std::string out(kSnapshotMagic, sizeof kSnapshotMagic);
  auto put = [&out](const auto& v) {
    const char* p = reinterpret_cast<const char*>(&v);
    out.append(p, sizeof v);
  };
  put(kSnapshotVersion);
  put(static_cast<std::uint32_t>(s.dim));
  put(static_cast<std::uint32_t>(s.n));
  put(static_cast<std::uint32_t>(s.fields.components));
  put(s.t);
  out.append(reinterpret_cast<const char*>(s.fields.data.data()),
             s.fields.data.size() * sizeof(double));
  return out;
}

inline Snapshot decode_snapshot(const std::string& bytes) {
  constexpr std::size_t header = 16 + 4 * 4 + 8;
  if (bytes.size() < header) fail(ErrorKind::Precondition, "snapshot truncated (header)");
  if (std::memcmp(bytes.data(), kSnapshotMagic, 16) != 0) {
    fail(ErrorKind::Precondition, "not a snapshot file (bad magic)");
  }
  std::size_t pos = 16;
  auto get = [&](auto& v) {
    std::memcpy(&v, bytes.data() + pos, sizeof v);
    pos += sizeof v;
  };
  std::uint32_t version = 0, dim = 0, n = 0, ncomp = 0;
  double t = 0.0;
  get(version);
  get(dim);
  get(n);
  get(ncomp);
  get(t);
  if (version != kSnapshotVersion) {
    fail(ErrorKind::Precondition, "unsupported snapshot version " + std::to_string(version));
  }
  Snapshot s;
  s.dim = static_cast<int>(dim);
  s.n = static_cast<int>(n);
  s.t = t;
  const Grid g(s.dim, s.n);
  if (ncomp != 3 * dim) fail(ErrorKind::Precondition, "snapshot component count mismatch");
  s.fields = RealField(g, static_cast<int>(ncomp));
  const std::size_t payload = s.fields.data.size() * sizeof(double);
  if (bytes.size() != header + payload) {
    fail(ErrorKind::Precondition, "snapshot size mismatch: expected " +
                                      std::to_string(header + payload) + " bytes, got " +
                                      std::to_string(bytes.size()));
  }
  std::memcpy(s.fields.data.data(), bytes.data() + header, payload);
  return s;
}

inline std::string snapshot_path(const std::string& prefix, long index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "_%06ld.snap", index);
  return prefix + buf;
}

inline void write_snapshot(const std::string& path, const State& s) {
  write_text_file(path, encode_snapshot(make_snapshot(s)));
}

inline Snapshot read_snapshot(const std::string& path) {
  return decode_snapshot(read_text_file(path));
}

}  // namespace elh
