#include "hardylab/report.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>
#include <unistd.h>

#include "hardylab/errors.hpp"

namespace hardylab {

namespace fs = std::filesystem;

std::string sha256_hex(std::string_view data) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), md, &len) != 1)
    fail(ErrorCode::IOError, "sha256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

void write_atomic(const fs::path& path, std::string_view content) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) fail(ErrorCode::IOError, "cannot write " + tmp.string());
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    f.flush();
    if (!f) {
      f.close();
      fs::remove(tmp, ec);
      fail(ErrorCode::IOError, "short write to " + tmp.string());
    }
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    fail(ErrorCode::IOError, "cannot rename onto " + path.string());
  }
}

OutputDir::OutputDir(fs::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec || !fs::is_directory(dir_)) fail(ErrorCode::IOError, "cannot create output directory " + dir_.string());
}

void OutputDir::write(const std::string& name, std::string_view content) {
  write_atomic(dir_ / name, content);
  files_.push_back({name, sha256_hex(content), content.size()});
}

std::string csv_line(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += cells[i];
  }
  out += '\n';
  return out;
}

// --- cache --------------------------------------------------------------

namespace {

constexpr char kMagic[8] = {'H', 'L', 'F', 'O', 'R', 'M', 'S', '1'};

template <class T>
void put(std::string& buf, T v) {
  char raw[sizeof(T)];
  std::memcpy(raw, &v, sizeof(T));
  buf.append(raw, sizeof(T));
}

struct Cursor {
  const std::string& buf;
  std::size_t pos = 0;
  template <class T>
  T get() {
    if (pos + sizeof(T) > buf.size()) fail(ErrorCode::IOError, "cache file truncated");
    T v;
    std::memcpy(&v, buf.data() + pos, sizeof(T));
    pos += sizeof(T);
    return v;
  }
};

}  // namespace

fs::path cache_file(const fs::path& dir, const std::string& config_hash) { return dir / (config_hash + ".forms"); }

void save_forms(const fs::path& path, const QuadraticForms& forms) {
  const SparsityPattern& p = *forms.pattern;
  std::string buf;
  buf.reserve(40 + p.nnz() * 48 + forms.dof_count);
  buf.append(kMagic, 8);
  put<std::uint64_t>(buf, forms.dof_count);
  put<std::uint64_t>(buf, p.nnz());
  put<double>(buf, forms.eta_over_q_bound);
  put<double>(buf, forms.q_over_log_bound);
  for (std::size_t i = 0; i < p.n; ++i)
    for (int e = p.row_ptr[i]; e < p.row_ptr[i + 1]; ++e) {
      put<std::int32_t>(buf, static_cast<std::int32_t>(i));
      put<std::int32_t>(buf, p.col[e]);
      for (int f = 0; f < kFormCount; ++f) put<double>(buf, forms.values[f][e]);
    }
  for (std::size_t i = 0; i < forms.dof_count; ++i) put<std::uint8_t>(buf, forms.outer.empty() ? 0 : forms.outer[i]);
  write_atomic(path, buf);
}

std::optional<QuadraticForms> load_forms(const fs::path& path, const std::string& config_hash) {
  std::ifstream f(path, std::ios::binary);
  if (!f) return std::nullopt;
  std::ostringstream ss;
  ss << f.rdbuf();
  const std::string buf = ss.str();
  if (buf.size() < 8 || std::memcmp(buf.data(), kMagic, 8) != 0)
    fail(ErrorCode::IOError, "bad cache header in " + path.string());
  Cursor c{buf, 8};
  QuadraticForms out;
  out.dof_count = c.get<std::uint64_t>();
  const auto nnz = c.get<std::uint64_t>();
  out.eta_over_q_bound = c.get<double>();
  out.q_over_log_bound = c.get<double>();
  if (buf.size() != 40 + nnz * 48 + out.dof_count) fail(ErrorCode::IOError, "cache size mismatch in " + path.string());
  auto pat = std::make_shared<SparsityPattern>();
  pat->n = out.dof_count;
  pat->row_ptr.assign(out.dof_count + 1, 0);
  pat->col.resize(nnz);
  for (auto& v : out.values) v.resize(nnz);
  std::int64_t prev_row = -1, prev_col = -1;
  for (std::uint64_t e = 0; e < nnz; ++e) {
    const auto row = c.get<std::int32_t>();
    const auto col = c.get<std::int32_t>();
    if (row < 0 || static_cast<std::uint64_t>(row) >= out.dof_count || col < 0 ||
        static_cast<std::uint64_t>(col) >= out.dof_count || row < prev_row || (row == prev_row && col <= prev_col))
      fail(ErrorCode::IOError, "unsorted or out-of-range cache record");
    prev_row = row;
    prev_col = col;
    pat->row_ptr[row + 1]++;
    pat->col[e] = col;
    for (int k = 0; k < kFormCount; ++k) out.values[k][e] = c.get<double>();
  }
  for (std::size_t i = 0; i < out.dof_count; ++i) pat->row_ptr[i + 1] += pat->row_ptr[i];
  out.outer.resize(out.dof_count);
  for (std::size_t i = 0; i < out.dof_count; ++i) out.outer[i] = static_cast<char>(c.get<std::uint8_t>());
  out.pattern = std::move(pat);
  out.config_hash = config_hash;
  return out;
}

}  // namespace hardylab
