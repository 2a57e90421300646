#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "qerc/errors.hpp"

namespace qerc::io {

namespace fs = std::filesystem;

/// FNV-1a 64-bit, used for content-addressed cache keys and manifests.
inline std::uint64_t fnv1a64(const void* data, std::size_t len,
                             std::uint64_t seed = 0xcbf29ce484222325ull) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::uint64_t fnv1a64(const std::string& s, std::uint64_t seed = 0xcbf29ce484222325ull) {
  return fnv1a64(s.data(), s.size(), seed);
}

inline std::uint64_t hash_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("hash_file: cannot open " + path.string());
  std::uint64_t h = 0xcbf29ce484222325ull;
  char buf[1 << 16];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0)
    h = fnv1a64(buf, static_cast<std::size_t>(in.gcount()), h);
  return h;
}

inline std::string hex64(std::uint64_t v) {
  std::ostringstream out;
  out << std::hex << v;
  return out.str();
}

/// Writes through a temp file in the same directory and renames, so readers
/// never observe partial output.
inline void atomic_write(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("atomic_write: cannot open " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error("atomic_write: short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

/// CSV with a header row; cells are written with max_digits10 precision.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (i) out_ << ',';
      out_ << header[i];
    }
    out_ << '\n';
    out_.precision(17);
  }

  template <typename... Ts>
  void row(const Ts&... cells) {
    std::size_t i = 0;
    ((out_ << (i++ ? "," : "") << cells), ...);
    out_ << '\n';
  }

  void save(const fs::path& path) const { atomic_write(path, out_.str()); }

 private:
  std::ostringstream out_;
};

/// Dense double matrix in a tiny tagged binary format (cache artifacts).
inline void save_matrix(const fs::path& path, const Eigen::MatrixXd& m) {
  std::ostringstream out(std::ios::binary);
  const char magic[8] = {'Q', 'E', 'R', 'C', 'M', 'A', 'T', '1'};
  out.write(magic, 8);
  const std::int64_t rows = m.rows(), cols = m.cols();
  out.write(reinterpret_cast<const char*>(&rows), 8);
  out.write(reinterpret_cast<const char*>(&cols), 8);
  out.write(reinterpret_cast<const char*>(m.data()),
            static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(rows * cols)));
  atomic_write(path, out.str());
}

inline Eigen::MatrixXd load_matrix(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("load_matrix: cannot open " + path.string());
  char magic[8];
  in.read(magic, 8);
  if (!in || std::string(magic, 8) != "QERCMAT1")
    throw Error("load_matrix: bad magic in " + path.string());
  std::int64_t rows = 0, cols = 0;
  in.read(reinterpret_cast<char*>(&rows), 8);
  in.read(reinterpret_cast<char*>(&cols), 8);
  if (!in || rows < 0 || cols < 0) throw Error("load_matrix: bad header in " + path.string());
  Eigen::MatrixXd m(rows, cols);
  in.read(reinterpret_cast<char*>(m.data()),
          static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(rows * cols)));
  if (!in) throw Error("load_matrix: data ends early in " + path.string());
  return m;
}

}  // namespace qerc::io
