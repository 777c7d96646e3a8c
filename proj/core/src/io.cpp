#include "maxstab/io.hpp"

#include <openssl/evp.h>

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>

#include "maxstab/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "field container assumes a little-endian host");

namespace maxstab {

namespace {

constexpr char kMagic[4] = {'M', 'X', 'S', 'B'};
constexpr std::uint32_t kVersion = 1;

void put_bytes(std::ofstream& os, const void* p, std::size_t n) {
  os.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

template <class T>
void put(std::ofstream& os, T v) {
  put_bytes(os, &v, sizeof v);
}

void get_bytes(std::ifstream& is, void* p, std::size_t n,
               const std::filesystem::path& path) {
  is.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(is.gcount()) != n)
    throw io_error("truncated field file: " + path.string());
}

template <class T>
T get(std::ifstream& is, const std::filesystem::path& path) {
  T v;
  get_bytes(is, &v, sizeof v, path);
  return v;
}

}  // namespace

void write_field(const std::filesystem::path& path, const FieldRealization& f) {
  f.validate();
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw io_error("cannot open for writing: " + path.string());
  put_bytes(os, kMagic, 4);
  put(os, kVersion);
  put(os, static_cast<std::uint32_t>(f.grid.dim));
  for (long c : f.grid.counts) put(os, static_cast<std::int64_t>(c));
  for (double o : f.grid.origin) put(os, o);
  put(os, f.grid.delta);
  put(os, f.seed);
  put(os, f.replicate);
  put(os, static_cast<std::uint32_t>(f.info.method));
  put(os, static_cast<std::int64_t>(f.info.spectral_draws));
  put(os, static_cast<std::uint8_t>(f.info.stopped_exactly ? 1 : 0));
  put(os, f.info.truncation_bound);
  put(os, f.info.threshold_bound);
  put(os, f.info.threshold_quantile);
  put(os, static_cast<std::uint8_t>(f.info.bias_possible ? 1 : 0));
  put(os, static_cast<std::uint32_t>(f.model_tag.size()));
  put_bytes(os, f.model_tag.data(), f.model_tag.size());
  put_bytes(os, f.values.data(), f.values.size() * sizeof(double));
  if (!os) throw io_error("write failed: " + path.string());
}

FieldRealization read_field(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw io_error("cannot open for reading: " + path.string());
  char magic[4];
  get_bytes(is, magic, 4, path);
  if (std::memcmp(magic, kMagic, 4) != 0)
    throw io_error("not a field file (bad magic): " + path.string());
  const auto version = get<std::uint32_t>(is, path);
  if (version != kVersion)
    throw io_error("unsupported field file version " + std::to_string(version) +
                   ": " + path.string());
  FieldRealization f;
  const auto dim = get<std::uint32_t>(is, path);
  if (dim < 1 || dim > 3) throw io_error("corrupt field file (dim): " + path.string());
  f.grid.dim = static_cast<int>(dim);
  for (auto& c : f.grid.counts) c = static_cast<long>(get<std::int64_t>(is, path));
  for (auto& o : f.grid.origin) o = get<double>(is, path);
  f.grid.delta = get<double>(is, path);
  f.grid.validate();
  f.seed = get<std::uint64_t>(is, path);
  f.replicate = get<std::uint64_t>(is, path);
  const auto method = get<std::uint32_t>(is, path);
  if (method > 2) throw io_error("corrupt field file (method): " + path.string());
  f.info.method = static_cast<SimMethod>(method);
  f.info.spectral_draws = static_cast<long>(get<std::int64_t>(is, path));
  f.info.stopped_exactly = get<std::uint8_t>(is, path) != 0;
  f.info.truncation_bound = get<double>(is, path);
  f.info.threshold_bound = get<double>(is, path);
  f.info.threshold_quantile = get<double>(is, path);
  f.info.bias_possible = get<std::uint8_t>(is, path) != 0;
  const auto tag_len = get<std::uint32_t>(is, path);
  if (tag_len > 4096) throw io_error("corrupt field file (tag): " + path.string());
  f.model_tag.resize(tag_len);
  if (tag_len) get_bytes(is, f.model_tag.data(), tag_len, path);
  f.values.resize(f.grid.size());
  get_bytes(is, f.values.data(), f.values.size() * sizeof(double), path);
  f.validate();
  return f;
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_csv(const std::filesystem::path& path,
               const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  if (header.empty()) throw input_error("write_csv: empty header");
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out += ',';
    out += header[i];
  }
  out += '\n';
  for (const auto& row : rows) {
    if (row.size() != header.size())
      throw input_error("write_csv: row width does not match the header");
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_double(row[i]);
    }
    out += '\n';
  }
  write_text(path, out);
}

void field_to_csv(const std::filesystem::path& path, const FieldRealization& f) {
  f.validate();
  std::vector<std::string> header;
  const char* axes[3] = {"x0", "x1", "x2"};
  for (int k = 0; k < f.grid.dim; ++k) header.push_back(axes[k]);
  header.push_back("value");
  std::vector<std::vector<double>> rows;
  rows.reserve(f.values.size());
  double x[3];
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    f.grid.site(i, x);
    std::vector<double> row(x, x + f.grid.dim);
    row.push_back(f.values[i]);
    rows.push_back(std::move(row));
  }
  write_csv(path, header, rows);
}

namespace {

std::string to_hex(const unsigned char* digest, unsigned int len) {
  static const char hex[] = "0123456789abcdef";
  std::string out(2 * len, '0');
  for (unsigned int i = 0; i < len; ++i) {
    out[2 * i] = hex[digest[i] >> 4];
    out[2 * i + 1] = hex[digest[i] & 0xF];
  }
  return out;
}

}  // namespace

std::string sha256_hex(std::span<const unsigned char> bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw io_error("sha256 digest failed");
  return to_hex(digest, len);
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw io_error("cannot open for hashing: " + path.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx) throw io_error("sha256 context allocation failed");
  if (EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
    EVP_MD_CTX_free(ctx);
    throw io_error("sha256 init failed");
  }
  char buf[1 << 16];
  while (is) {
    is.read(buf, sizeof buf);
    const std::streamsize got = is.gcount();
    if (got > 0 && EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(got)) != 1) {
      EVP_MD_CTX_free(ctx);
      throw io_error("sha256 update failed");
    }
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  const int ok = EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  if (ok != 1) throw io_error("sha256 final failed");
  return to_hex(digest, len);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw io_error("cannot open for writing: " + path.string());
  os.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!os) throw io_error("write failed: " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw io_error("cannot open for reading: " + path.string());
  std::string out((std::istreambuf_iterator<char>(is)),
                  std::istreambuf_iterator<char>());
  if (is.bad()) throw io_error("read failed: " + path.string());
  return out;
}

}  // namespace maxstab
