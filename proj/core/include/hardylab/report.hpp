#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hardylab/assembly.hpp"

namespace hardylab {

std::string sha256_hex(std::string_view data);

/// Write to a temporary sibling, then rename over the target. IOError on failure.
void write_atomic(const std::filesystem::path& path, std::string_view content);

struct OutputFile {
  std::string name;
  std::string sha256;
  std::uintmax_t bytes = 0;
};

/// Output directory that records a content hash for everything written to it.
class OutputDir {
public:
  explicit OutputDir(std::filesystem::path dir);

  void write(const std::string& name, std::string_view content);
  const std::vector<OutputFile>& files() const { return files_; }
  const std::filesystem::path& path() const { return dir_; }

private:
  std::filesystem::path dir_;
  std::vector<OutputFile> files_;
};

/// Comma-joined line with a trailing newline.
std::string csv_line(const std::vector<std::string>& cells);

// --- matrix cache -------------------------------------------------------
//
// Layout, little-endian:
//   char[8] "HLFORMS1"; u64 dof_count; u64 nnz; f64 eta_over_q_bound; f64 q_over_log_bound
//   nnz x { i32 row; i32 col; f64 A_b, M_q, M_eta, M_0, M_log }   sorted by (row, col)
//   dof_count x u8 outer

std::filesystem::path cache_file(const std::filesystem::path& dir, const std::string& config_hash);
void save_forms(const std::filesystem::path& path, const QuadraticForms& forms);
/// nullopt when missing; IOError when present but truncated or malformed.
std::optional<QuadraticForms> load_forms(const std::filesystem::path& path, const std::string& config_hash);

}  // namespace hardylab
