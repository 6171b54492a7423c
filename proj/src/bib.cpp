#include "synthbench/bib.hpp"

#include <cctype>
#include <map>

#include "synthbench/tex.hpp"
#include "synthbench/util.hpp"

namespace synthbench {

const std::string* BibEntry::find(std::string_view name) const {
  for (const auto& [k, v] : fields)
    if (k == name) return &v;
  return nullptr;
}

namespace {

struct Cursor {
  std::string_view text;
  std::size_t pos = 0;

  bool done() const { return pos >= text.size(); }
  char peek() const { return text[pos]; }
  void skip_ws() {
    while (!done() && std::isspace(static_cast<unsigned char>(peek()))) ++pos;
  }
};

// Reads one braced group (cursor on '{'), returning the inner text.
std::string read_braced(Cursor& c) {
  int depth = 0;
  std::size_t start = c.pos + 1;
  for (; !c.done(); ++c.pos) {
    char ch = c.peek();
    if (ch == '\\' && c.pos + 1 < c.text.size()) {
      ++c.pos;
      continue;
    }
    if (ch == '{') ++depth;
    if (ch == '}') {
      --depth;
      if (depth == 0) {
        std::string inner(c.text.substr(start, c.pos - start));
        ++c.pos;
        return inner;
      }
    }
  }
  throw Error("BibError", "unbalanced braces in value");
}

std::string read_quoted(Cursor& c) {
  std::size_t start = ++c.pos;
  int depth = 0;  // quotes inside braces do not close the string
  for (; !c.done(); ++c.pos) {
    char ch = c.peek();
    if (ch == '\\' && c.pos + 1 < c.text.size()) {
      ++c.pos;
      continue;
    }
    if (ch == '{') ++depth;
    if (ch == '}') --depth;
    if (ch == '"' && depth == 0) {
      std::string inner(c.text.substr(start, c.pos - start));
      ++c.pos;
      return inner;
    }
  }
  throw Error("BibError", "unterminated quoted value");
}

std::string read_bare(Cursor& c) {
  std::size_t start = c.pos;
  while (!c.done()) {
    char ch = c.peek();
    if (std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-' ||
        ch == '.' || ch == ':' || ch == '+') {
      ++c.pos;
    } else {
      break;
    }
  }
  if (c.pos == start) throw Error("BibError", "expected a value");
  return std::string(c.text.substr(start, c.pos - start));
}

// One value: pieces joined by '#', each braced, quoted, numeric, or a macro.
std::string read_value(Cursor& c, const std::map<std::string, std::string>& macros) {
  std::string out;
  while (true) {
    c.skip_ws();
    if (c.done()) throw Error("BibError", "value runs off the end of input");
    char ch = c.peek();
    if (ch == '{') {
      out += read_braced(c);
    } else if (ch == '"') {
      out += read_quoted(c);
    } else {
      std::string bare = read_bare(c);
      bool numeric = !bare.empty();
      for (char b : bare) numeric = numeric && std::isdigit(static_cast<unsigned char>(b));
      if (numeric) {
        out += bare;
      } else {
        auto it = macros.find(to_lower(bare));
        if (it == macros.end())
          throw Error("BibError", "undefined string macro '" + bare + "'");
        out += it->second;
      }
    }
    c.skip_ws();
    if (!c.done() && c.peek() == '#') {
      ++c.pos;
      continue;
    }
    break;
  }
  return collapse_ws(out);
}

std::string read_name(Cursor& c) {
  std::size_t start = c.pos;
  while (!c.done()) {
    char ch = c.peek();
    if (std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-' ||
        ch == '.' || ch == ':' || ch == '+' || ch == '/') {
      ++c.pos;
    } else {
      break;
    }
  }
  return std::string(c.text.substr(start, c.pos - start));
}

// Parses the body between the outer braces of one @type{...} block.
BibEntry parse_entry_body(const std::string& type, std::string_view body,
                          const std::map<std::string, std::string>& macros) {
  Cursor c{body};
  c.skip_ws();
  BibEntry entry;
  entry.entry_type = type;
  std::size_t key_start = c.pos;
  while (!c.done() && c.peek() != ',' &&
         !std::isspace(static_cast<unsigned char>(c.peek())))
    ++c.pos;
  entry.key = std::string(body.substr(key_start, c.pos - key_start));
  if (entry.key.empty()) throw Error("BibError", "entry has no citation key");
  c.skip_ws();
  if (!c.done() && c.peek() == ',') ++c.pos;

  while (true) {
    c.skip_ws();
    if (c.done()) break;
    std::string name = to_lower(read_name(c));
    if (name.empty()) throw Error("BibError", "expected a field name");
    c.skip_ws();
    if (c.done() || c.peek() != '=')
      throw Error("BibError", "field '" + name + "' missing '='");
    ++c.pos;
    std::string value = read_value(c, macros);
    entry.fields.emplace_back(name, value);
    c.skip_ws();
    if (!c.done() && c.peek() == ',') {
      ++c.pos;
      continue;
    }
    break;
  }
  c.skip_ws();
  if (!c.done())
    throw Error("BibError", "trailing garbage after fields of '" + entry.key + "'");
  return entry;
}

}  // namespace

ParsedBib parse_bib(std::string_view bib_source) {
  ParsedBib out;
  std::map<std::string, std::string> macros = {
      // the standard month abbreviations every BibTeX style predefines
      {"jan", "January"}, {"feb", "February"}, {"mar", "March"},
      {"apr", "April"},   {"may", "May"},      {"jun", "June"},
      {"jul", "July"},    {"aug", "August"},   {"sep", "September"},
      {"oct", "October"}, {"nov", "November"}, {"dec", "December"}};

  Cursor c{bib_source};
  while (true) {
    // Everything outside @-blocks is commentary in BibTeX.
    while (!c.done() && c.peek() != '@') ++c.pos;
    if (c.done()) break;
    std::size_t at_pos = c.pos;
    ++c.pos;
    std::string type = to_lower(read_name(c));
    try {
      c.skip_ws();
      if (c.done() || (c.peek() != '{' && c.peek() != '('))
        throw Error("BibError", "expected '{' after @" + type);
      std::string body;
      if (c.peek() == '(') {
        // Parenthesized form: read to the matching ')', tracking braces.
        std::size_t start = ++c.pos;
        int brace = 0;
        while (!c.done() && !(c.peek() == ')' && brace == 0)) {
          if (c.peek() == '{') ++brace;
          if (c.peek() == '}') --brace;
          ++c.pos;
        }
        if (c.done()) throw Error("BibError", "unterminated entry");
        body = std::string(c.text.substr(start, c.pos - start));
        ++c.pos;
      } else {
        body = read_braced(c);
      }

      if (type == "comment" || type == "preamble") continue;
      if (type == "string") {
        Cursor sc{body};
        std::string name = to_lower(read_name(sc));
        sc.skip_ws();
        if (name.empty() || sc.done() || sc.peek() != '=')
          throw Error("BibError", "malformed @string");
        ++sc.pos;
        macros[name] = read_value(sc, macros);
        continue;
      }

      BibEntry entry = parse_entry_body(type, body, macros);
      if (bib_title(entry).empty())
        throw Error("BibError", "entry '" + entry.key + "' has no usable title");
      out.entries.push_back(std::move(entry));
    } catch (const Error& e) {
      out.skipped.push_back("@" + type + " at offset " + std::to_string(at_pos) +
                            ": " + e.what());
      // Recover at the next line that starts a new block so one bad entry
      // cannot swallow the rest of the file.
      auto next_at = bib_source.find("\n@", at_pos + 1);
      if (next_at == std::string_view::npos) break;
      c.pos = next_at + 1;
    }
  }

  if (out.entries.empty())
    throw Error("EmptyBibliography", "no parseable bibliography entries found");
  return out;
}

std::string bib_title(const BibEntry& entry) {
  const std::string* t = entry.find("title");
  if (!t) return "";
  return strip_tex_markup(*t);
}

std::string serialize_bib(const std::vector<BibEntry>& entries) {
  std::string out;
  for (const auto& e : entries) {
    out += "@" + e.entry_type + "{" + e.key;
    for (const auto& [name, value] : e.fields)
      out += ",\n  " + name + " = {" + value + "}";
    out += "\n}\n\n";
  }
  return out;
}

}  // namespace synthbench
