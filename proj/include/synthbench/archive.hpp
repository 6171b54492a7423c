#pragma once

#include <map>
#include <string>

namespace synthbench {

/// Extracted source files: path inside the archive -> contents.
using FileMap = std::map<std::string, std::string>;

bool is_gzip(std::string_view data);
bool is_tar(std::string_view data);
bool is_pdf(std::string_view data);

/// Inflates a gzip stream. Throws Error("ArchiveError") on corrupt input.
std::string gunzip(std::string_view data);

/// Reads regular files out of a ustar/v7 tar stream.
FileMap untar(std::string_view data);

/// Decodes an ArXiv e-print body: gzipped tar, gzipped single TeX file, plain
/// tar, or PDF. A bare gzipped file is returned as {"main.tex": ...}. PDF-only
/// sources return an empty map (no LaTeX available).
FileMap extract_source_archive(std::string_view data);

}  // namespace synthbench
