#include "synthbench/archive.hpp"

#include <zlib.h>

#include <cstring>

#include "synthbench/util.hpp"

namespace synthbench {

bool is_gzip(std::string_view data) {
  return data.size() >= 2 && static_cast<unsigned char>(data[0]) == 0x1f &&
         static_cast<unsigned char>(data[1]) == 0x8b;
}

bool is_pdf(std::string_view data) { return data.substr(0, 5) == "%PDF-"; }

bool is_tar(std::string_view data) {
  // ustar magic lives at offset 257 of the first header block.
  if (data.size() >= 263 && data.substr(257, 5) == "ustar") return true;
  // Pre-POSIX tars lack magic; accept a plausible header: NUL-terminated name
  // plus a valid octal size field.
  if (data.size() < 512) return false;
  if (data[0] == '\0') return false;
  for (int i = 124; i < 136; ++i) {
    char c = data[i];
    if (c == '\0' || c == ' ') continue;
    if (c < '0' || c > '7') return false;
  }
  return true;
}

std::string gunzip(std::string_view data) {
  z_stream zs{};
  // 15 window bits + 16 selects gzip decoding.
  if (inflateInit2(&zs, 15 + 16) != Z_OK)
    throw Error("ArchiveError", "inflateInit2 failed");
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
  zs.avail_in = static_cast<uInt>(data.size());

  std::string out;
  char buf[1 << 16];
  int rc = Z_OK;
  while (rc != Z_STREAM_END) {
    zs.next_out = reinterpret_cast<Bytef*>(buf);
    zs.avail_out = sizeof(buf);
    rc = inflate(&zs, Z_NO_FLUSH);
    if (rc != Z_OK && rc != Z_STREAM_END) {
      inflateEnd(&zs);
      throw Error("ArchiveError",
                  "gzip inflate failed: " + std::string(zs.msg ? zs.msg : "corrupt stream"));
    }
    out.append(buf, sizeof(buf) - zs.avail_out);
    if (rc == Z_OK && zs.avail_in == 0 && zs.avail_out != 0) {
      inflateEnd(&zs);
      throw Error("ArchiveError", "gzip stream truncated");
    }
  }
  inflateEnd(&zs);
  return out;
}

namespace {

std::uint64_t parse_octal(std::string_view field) {
  std::uint64_t v = 0;
  for (char c : field) {
    if (c == '\0' || c == ' ') continue;
    if (c < '0' || c > '7') throw Error("ArchiveError", "bad octal field in tar header");
    v = v * 8 + static_cast<std::uint64_t>(c - '0');
  }
  return v;
}

std::string header_string(std::string_view block, std::size_t off, std::size_t len) {
  std::string_view raw = block.substr(off, len);
  auto nul = raw.find('\0');
  return std::string(raw.substr(0, nul == std::string_view::npos ? raw.size() : nul));
}

}  // namespace

FileMap untar(std::string_view data) {
  FileMap files;
  std::size_t pos = 0;
  std::string pending_longname;
  while (pos + 512 <= data.size()) {
    std::string_view block = data.substr(pos, 512);
    if (block[0] == '\0') break;  // end-of-archive zero block
    std::string name = header_string(block, 0, 100);
    std::string prefix = block.substr(257, 5) == "ustar" ? header_string(block, 345, 155) : "";
    std::uint64_t size = parse_octal(block.substr(124, 12));
    char typeflag = block[156];
    pos += 512;
    if (pos + size > data.size()) throw Error("ArchiveError", "tar entry extends past archive end");
    std::string_view body = data.substr(pos, size);
    pos += (size + 511) / 512 * 512;

    if (typeflag == 'L') {  // GNU long filename extension
      pending_longname = std::string(body);
      if (auto nul = pending_longname.find('\0'); nul != std::string::npos)
        pending_longname.resize(nul);
      continue;
    }
    std::string path = pending_longname.empty()
                           ? (prefix.empty() ? name : prefix + "/" + name)
                           : pending_longname;
    pending_longname.clear();
    if (typeflag == '0' || typeflag == '\0') files[path] = std::string(body);
  }
  return files;
}

FileMap extract_source_archive(std::string_view data) {
  if (is_pdf(data)) return {};
  std::string inflated;
  std::string_view payload = data;
  if (is_gzip(data)) {
    inflated = gunzip(data);
    payload = inflated;
  }
  if (is_pdf(payload)) return {};
  if (is_tar(payload)) return untar(payload);
  // Single-file e-print: the gzip member wraps one TeX source directly.
  return {{"main.tex", std::string(payload)}};
}

}  // namespace synthbench
