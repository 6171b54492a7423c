#include <doctest.h>

#include "synthbench/archive.hpp"
#include "synthbench/util.hpp"

using namespace synthbench;

namespace {
std::string fixture(const std::string& name) {
  return read_file(std::string(FIXTURE_DIR) + "/archive/" + name);
}
}  // namespace

TEST_CASE("format sniffing") {
  CHECK(is_gzip(fixture("sample.tar.gz")));
  CHECK(is_pdf(fixture("sample.pdf")));
  CHECK_FALSE(is_gzip("plain text"));
  CHECK_FALSE(is_pdf("plain text"));
}

TEST_CASE("gzipped tar extracts both members") {
  auto files = extract_source_archive(fixture("sample.tar.gz"));
  REQUIRE(files.size() == 2);
  CHECK(files.at("main.tex").find("\\section{Related Work}") != std::string::npos);
  CHECK(files.at("refs.bib").find("@article{a") != std::string::npos);
}

TEST_CASE("bare gzipped file falls back to main.tex") {
  auto files = extract_source_archive(fixture("solo.gz"));
  REQUIRE(files.size() == 1);
  CHECK(files.at("main.tex") == "Just one \\TeX{} file.\n");
}

TEST_CASE("pdf-only source yields no files") {
  CHECK(extract_source_archive(fixture("sample.pdf")).empty());
}

TEST_CASE("corrupt gzip raises ArchiveError") {
  std::string junk = fixture("sample.tar.gz").substr(0, 20);
  try {
    gunzip(junk);
    FAIL("expected ArchiveError");
  } catch (const Error& e) {
    CHECK(e.code() == "ArchiveError");
  }
}

TEST_CASE("gunzip round-trips the tar payload") {
  std::string tar = gunzip(fixture("sample.tar.gz"));
  CHECK(is_tar(tar));
  auto files = untar(tar);
  CHECK(files.count("main.tex") == 1);
}
