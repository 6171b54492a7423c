#include "synthbench/tex.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "synthbench/util.hpp"

namespace synthbench {

namespace {

bool is_letter(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

const std::set<std::string>& removable_envs() {
  static const std::set<std::string> kEnvs = {
      "figure",     "figure*",     "table",          "table*",
      "subfigure",  "subtable",    "wrapfigure",     "wraptable",
      "sidewaysfigure", "sidewaystable"};
  return kEnvs;
}

const std::set<std::string>& math_envs() {
  static const std::set<std::string> kEnvs = {
      "equation", "equation*", "align",   "align*",      "gather", "gather*",
      "eqnarray", "eqnarray*", "math",    "displaymath", "multline",
      "multline*"};
  return kEnvs;
}

const std::set<std::string>& cite_commands() {
  static const std::set<std::string> kCmds = {"cite", "citep", "citet",
                                              "citeauthor", "citealp"};
  return kCmds;
}

std::string normalize_newlines(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\r') {
      if (i + 1 < s.size() && s[i + 1] == '\n') continue;
      out += '\n';
    } else {
      out += s[i];
    }
  }
  return out;
}

// Removes '%' comments. A '%' escaped as "\%" is literal and kept escaped so
// repeated cleaning cannot reinterpret it. Lines that were pure comments are
// dropped entirely rather than left as blank lines.
std::string strip_comments(std::string_view text) {
  std::string out;
  std::size_t line_start = 0;
  while (line_start <= text.size()) {
    auto nl = text.find('\n', line_start);
    std::string_view line = text.substr(
        line_start, nl == std::string_view::npos ? std::string_view::npos : nl - line_start);
    std::size_t cut = line.size();
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '%' && (i == 0 || line[i - 1] != '\\')) {
        cut = i;
        break;
      }
    }
    std::string_view kept = line.substr(0, cut);
    bool had_comment = cut != line.size();
    bool kept_blank = trim(kept).empty();
    if (had_comment && kept_blank && !trim(line).empty()) {
      // whole-line comment: drop the line, do not create a paragraph break
    } else {
      out += std::string(kept);
      out += '\n';
    }
    if (nl == std::string_view::npos) break;
    line_start = nl + 1;
  }
  if (!out.empty() && text.back() != '\n' && out.back() == '\n') out.pop_back();
  return out;
}

// Returns the position one past the balanced "\end{env}" matching the
// "\begin{env}" at `begin_pos`, or npos when unbalanced.
std::size_t find_env_end(const std::string& text, std::size_t begin_pos,
                         const std::string& env) {
  std::string open = "\\begin{" + env + "}";
  std::string close = "\\end{" + env + "}";
  int depth = 0;
  std::size_t pos = begin_pos;
  while (pos < text.size()) {
    auto next_open = text.find(open, pos);
    auto next_close = text.find(close, pos);
    if (next_close == std::string::npos) return std::string::npos;
    if (next_open != std::string::npos && next_open < next_close) {
      ++depth;
      pos = next_open + open.size();
    } else {
      --depth;
      pos = next_close + close.size();
      if (depth == 0) return pos;
    }
  }
  return std::string::npos;
}

// Deletes float environments wholesale. Unbalanced environments are removed
// up to the next blank line (best effort) and flagged.
void remove_float_envs(std::string& text, bool& warning) {
  std::size_t pos = 0;
  while ((pos = text.find("\\begin{", pos)) != std::string::npos) {
    auto name_end = text.find('}', pos + 7);
    if (name_end == std::string::npos) break;
    std::string env = text.substr(pos + 7, name_end - pos - 7);
    if (!removable_envs().count(env)) {
      pos = name_end;
      continue;
    }
    std::size_t end = find_env_end(text, pos, env);
    if (end == std::string::npos) {
      warning = true;
      auto para = text.find("\n\n", pos);
      end = para == std::string::npos ? text.size() : para;
    }
    text.erase(pos, end - pos);
    // Avoid manufacturing a paragraph break where the float sat on its own lines.
    if (pos > 0 && pos < text.size() && text[pos - 1] == '\n' && text[pos] == '\n')
      text.erase(pos, 1);
  }
}

// Replaces math spans with control-character placeholders so the prose
// passes cannot disturb them; restore() reinserts them verbatim.
class MathMasker {
 public:
  std::string mask(std::string text) {
    for (const auto& env : math_envs()) {
      std::string open = "\\begin{" + env + "}";
      std::size_t pos = 0;
      while ((pos = text.find(open, pos)) != std::string::npos) {
        std::size_t end = find_env_end(text, pos, env);
        if (end == std::string::npos) break;
        text.replace(pos, end - pos, stash(text.substr(pos, end - pos)));
        ++pos;
      }
    }
    // Inline $...$ and display $$...$$; an unpaired '$' is left alone.
    std::string out;
    std::size_t i = 0;
    while (i < text.size()) {
      bool escaped = i > 0 && text[i - 1] == '\\';
      if (text[i] != '$' || escaped) {
        out += text[i++];
        continue;
      }
      bool display = i + 1 < text.size() && text[i + 1] == '$';
      std::string delim = display ? "$$" : "$";
      std::size_t search = i + delim.size();
      std::size_t close = std::string::npos;
      while (search < text.size()) {
        auto cand = text.find(delim, search);
        if (cand == std::string::npos) break;
        if (text[cand - 1] == '\\') {
          search = cand + 1;
          continue;
        }
        close = cand;
        break;
      }
      auto para = text.find("\n\n", i);
      if (close == std::string::npos || (para != std::string::npos && para < close)) {
        out += text[i++];  // unterminated within the paragraph: literal
        continue;
      }
      out += stash(text.substr(i, close + delim.size() - i));
      i = close + delim.size();
    }
    return out;
  }

  std::string restore(std::string text) const {
    for (std::size_t idx = spans_.size(); idx-- > 0;) {
      std::string ph = placeholder(idx);
      auto p = text.find(ph);
      if (p != std::string::npos) text.replace(p, ph.size(), spans_[idx]);
    }
    return text;
  }

 private:
  static std::string placeholder(std::size_t idx) {
    return std::string(1, '\x01') + std::to_string(idx) + std::string(1, '\x02');
  }
  std::string stash(std::string span) {
    spans_.push_back(std::move(span));
    return placeholder(spans_.size() - 1);
  }
  std::vector<std::string> spans_;
};

// Position one past a balanced brace group starting at text[pos]=='{';
// npos when unbalanced.
std::size_t brace_group_end(std::string_view text, std::size_t pos) {
  int depth = 0;
  for (std::size_t i = pos; i < text.size(); ++i) {
    if (text[i] == '\\') {
      ++i;  // skip escaped char
      continue;
    }
    if (text[i] == '{') ++depth;
    if (text[i] == '}') {
      --depth;
      if (depth == 0) return i + 1;
    }
  }
  return std::string_view::npos;
}

std::size_t bracket_group_end(std::string_view text, std::size_t pos) {
  int depth = 0;
  for (std::size_t i = pos; i < text.size(); ++i) {
    if (text[i] == '\\') {
      ++i;
      continue;
    }
    if (text[i] == '[') ++depth;
    if (text[i] == ']') {
      --depth;
      if (depth == 0) return i + 1;
    }
  }
  return std::string_view::npos;
}

// Reads the command name (letters, optional trailing '*') at text[pos]=='\\'.
std::string command_at(std::string_view text, std::size_t pos) {
  std::size_t i = pos + 1;
  std::string name;
  while (i < text.size() && is_letter(text[i])) name += text[i++];
  if (!name.empty() && i < text.size() && text[i] == '*') name += '*';
  return name;
}

std::string base_command(std::string name) {
  if (!name.empty() && name.back() == '*') name.pop_back();
  return name;
}

// One parsed cite-family occurrence.
struct CiteHit {
  std::size_t begin = 0;  // offset of the backslash
  std::size_t end = 0;    // one past the closing '}'
  std::vector<std::string> keys;
};

std::vector<CiteHit> find_cites(std::string_view text) {
  std::vector<CiteHit> hits;
  std::size_t pos = 0;
  while ((pos = text.find('\\', pos)) != std::string_view::npos) {
    std::string name = command_at(text, pos);
    if (!cite_commands().count(base_command(name))) {
      pos += 1 + (name.empty() ? 0 : name.size());
      continue;
    }
    std::size_t cursor = pos + 1 + name.size();
    for (int opt = 0; opt < 2; ++opt) {  // up to two optional [..] arguments
      while (cursor < text.size() && (text[cursor] == ' ' || text[cursor] == '\n'))
        ++cursor;
      if (cursor < text.size() && text[cursor] == '[') {
        auto e = bracket_group_end(text, cursor);
        if (e == std::string_view::npos) break;
        cursor = e;
      }
    }
    while (cursor < text.size() && (text[cursor] == ' ' || text[cursor] == '\n')) ++cursor;
    if (cursor >= text.size() || text[cursor] != '{') {
      pos += 1 + name.size();
      continue;
    }
    auto group_end = brace_group_end(text, cursor);
    if (group_end == std::string_view::npos) {
      pos += 1 + name.size();
      continue;
    }
    CiteHit hit;
    hit.begin = pos;
    hit.end = group_end;
    for (auto key : split(text.substr(cursor + 1, group_end - cursor - 2), ',')) {
      std::string k = trim(key);
      if (!k.empty()) hit.keys.push_back(k);
    }
    hits.push_back(std::move(hit));
    pos = group_end;
  }
  return hits;
}

// Replaces cite-family commands with "[n]..." placeholders numbered by first
// appearance of each unique key.
std::string replace_cites_with_markers(const std::string& text) {
  auto hits = find_cites(text);
  std::map<std::string, int> numbers;
  int next = 1;
  std::string out;
  std::size_t copied = 0;
  for (const auto& hit : hits) {
    out += text.substr(copied, hit.begin - copied);
    std::string markers;
    for (const auto& key : hit.keys) {
      auto [it, inserted] = numbers.emplace(key, next);
      if (inserted) ++next;
      markers += "[" + std::to_string(it->second) + "]";
    }
    out += markers;
    copied = hit.end;
  }
  out += text.substr(copied);
  return out;
}

// Removes "\cmd{...}" (token plus argument) for every command in `cmds`.
void drop_command_with_arg(std::string& text, const std::set<std::string>& cmds) {
  std::size_t pos = 0;
  while ((pos = text.find('\\', pos)) != std::string::npos) {
    std::string name = command_at(text, pos);
    if (!cmds.count(base_command(name))) {
      pos += 1 + std::max<std::size_t>(name.size(), 1);
      continue;
    }
    std::size_t cursor = pos + 1 + name.size();
    while (cursor < text.size() && (text[cursor] == ' ' || text[cursor] == '\n')) ++cursor;
    if (cursor < text.size() && text[cursor] == '[') {
      auto e = bracket_group_end(text, cursor);
      if (e != std::string::npos) cursor = e;
    }
    if (cursor < text.size() && text[cursor] == '{') {
      auto e = brace_group_end(text, cursor);
      if (e != std::string::npos) cursor = e;
    }
    text.erase(pos, cursor - pos);
  }
}

// \href{url}{text} -> text ; \url{x} -> x
void resolve_links(std::string& text) {
  std::size_t pos = 0;
  while ((pos = text.find('\\', pos)) != std::string::npos) {
    std::string name = command_at(text, pos);
    if (name == "href") {
      std::size_t cursor = pos + 5;
      auto url_end = text[cursor] == '{' ? brace_group_end(text, cursor) : std::string::npos;
      if (url_end == std::string::npos || url_end >= text.size() || text[url_end] != '{') {
        ++pos;
        continue;
      }
      auto label_end = brace_group_end(text, url_end);
      if (label_end == std::string::npos) {
        ++pos;
        continue;
      }
      std::string label = text.substr(url_end + 1, label_end - url_end - 2);
      text.replace(pos, label_end - pos, label);
    } else if (name == "url") {
      std::size_t cursor = pos + 4;
      if (cursor >= text.size() || text[cursor] != '{') {
        ++pos;
        continue;
      }
      auto e = brace_group_end(text, cursor);
      if (e == std::string::npos) {
        ++pos;
        continue;
      }
      text.replace(pos, e - pos, text.substr(cursor + 1, e - cursor - 2));
    } else {
      pos += 1 + std::max<std::size_t>(name.size(), 1);
    }
  }
}

// Structural tokens: residual \begin/\end pairs vanish (bodies stay),
// \item becomes a dash, \\ becomes a newline, \par a paragraph break.
void replace_structure(std::string& text) {
  std::size_t pos = 0;
  while ((pos = text.find('\\', pos)) != std::string::npos) {
    if (pos + 1 < text.size() && text[pos + 1] == '\\') {
      std::size_t cursor = pos + 2;
      if (cursor < text.size() && text[cursor] == '[') {
        auto e = bracket_group_end(text, cursor);
        if (e != std::string::npos) cursor = e;
      }
      text.replace(pos, cursor - pos, "\n");
      continue;
    }
    std::string name = command_at(text, pos);
    std::string base = base_command(name);
    if (base == "begin" || base == "end") {
      std::size_t cursor = pos + 1 + name.size();
      if (cursor < text.size() && text[cursor] == '{') {
        auto e = brace_group_end(text, cursor);
        if (e != std::string::npos) {
          cursor = e;
          if (cursor < text.size() && text[cursor] == '[') {
            auto b = bracket_group_end(text, cursor);
            if (b != std::string::npos) cursor = b;
          }
          text.erase(pos, cursor - pos);
          continue;
        }
      }
    } else if (base == "item") {
      std::size_t cursor = pos + 1 + name.size();
      if (cursor < text.size() && text[cursor] == '[') {
        auto e = bracket_group_end(text, cursor);
        if (e != std::string::npos) cursor = e;
      }
      text.replace(pos, cursor - pos, "- ");
      continue;
    } else if (base == "par") {
      text.replace(pos, 1 + name.size(), "\n\n");
      continue;
    }
    pos += 1 + std::max<std::size_t>(name.size(), 1);
  }
  std::replace(text.begin(), text.end(), '~', ' ');
}

// Unknown commands: "\cmd{x}" unwraps to "x", bare "\cmd" disappears.
// Escaped single characters ("\%", "\&") are not commands and survive.
void strip_generic_commands(std::string& text) {
  std::size_t pos = 0;
  while ((pos = text.find('\\', pos)) != std::string::npos) {
    std::string name = command_at(text, pos);
    if (name.empty()) {
      pos += 2;  // escaped character, keep
      continue;
    }
    std::size_t cursor = pos + 1 + name.size();
    if (cursor < text.size() && (text[cursor] == ' ' || text[cursor] == '\n') &&
        cursor + 1 < text.size() && text[cursor + 1] == '{')
      ++cursor;
    if (cursor < text.size() && text[cursor] == '{') {
      auto e = brace_group_end(text, cursor);
      if (e != std::string::npos) {
        std::string inner = text.substr(cursor + 1, e - cursor - 2);
        text.replace(pos, e - pos, inner);
        continue;  // rescan from pos: inner may hold more commands
      }
    }
    text.erase(pos, cursor - pos);
  }
}

void unescape_inert(std::string& text) {
  for (std::string_view esc : {"\\&", "\\_", "\\#"}) {
    std::size_t pos = 0;
    while ((pos = text.find(esc, pos)) != std::string::npos) {
      text.erase(pos, 1);
      ++pos;
    }
  }
}

void drop_bare_braces(std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '\\' && i + 1 < text.size() && (text[i + 1] == '{' || text[i + 1] == '}')) {
      out += text[i];
      out += text[i + 1];
      ++i;
      continue;
    }
    if (text[i] == '{' || text[i] == '}') continue;
    out += text[i];
  }
  text = std::move(out);
}

std::string normalize_whitespace(const std::string& text) {
  std::vector<std::string> kept;
  for (auto line : split(text, '\n')) {
    std::string collapsed;
    bool in_space = false;
    for (char c : line) {
      if (c == ' ' || c == '\t') {
        in_space = true;
        continue;
      }
      if (in_space && !collapsed.empty()) collapsed += ' ';
      in_space = false;
      collapsed += c;
    }
    if (collapsed.empty()) {
      // keep at most one blank line between paragraphs, none at the start
      if (!kept.empty() && !kept.back().empty()) kept.emplace_back();
    } else {
      kept.push_back(std::move(collapsed));
    }
  }
  while (!kept.empty() && kept.back().empty()) kept.pop_back();
  std::string out;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    if (i) out += '\n';
    out += kept[i];
  }
  return out;
}

struct Heading {
  std::size_t cmd_pos;    // offset of the backslash
  std::size_t body_pos;   // one past the closing '}' of the title
  int level;              // part=0 ... paragraph=5
  std::string title_raw;  // title group contents
};

std::vector<Heading> find_headings(std::string_view text) {
  static const std::map<std::string, int> kLevels = {
      {"part", 0},       {"chapter", 1},       {"section", 2},
      {"subsection", 3}, {"subsubsection", 4}, {"paragraph", 5}};
  std::vector<Heading> out;
  std::size_t pos = 0;
  while ((pos = text.find('\\', pos)) != std::string_view::npos) {
    std::string name = command_at(text, pos);
    auto it = kLevels.find(base_command(name));
    if (it == kLevels.end()) {
      pos += 1 + std::max<std::size_t>(name.size(), 1);
      continue;
    }
    std::size_t cursor = pos + 1 + name.size();
    if (cursor < text.size() && text[cursor] == '[') {
      auto e = bracket_group_end(text, cursor);
      if (e != std::string_view::npos) cursor = e;
    }
    if (cursor >= text.size() || text[cursor] != '{') {
      pos += 1 + name.size();
      continue;
    }
    auto e = brace_group_end(text, cursor);
    if (e == std::string_view::npos) {
      pos += 1 + name.size();
      continue;
    }
    out.push_back({pos, e, it->second,
                   std::string(text.substr(cursor + 1, e - cursor - 2))});
    pos = e;
  }
  return out;
}

}  // namespace

std::vector<std::string> default_related_work_names() {
  return {"related work", "prior work"};
}

std::string strip_tex_markup(std::string_view text) {
  std::string s(text);
  std::size_t pos = 0;
  while ((pos = s.find('\\', pos)) != std::string::npos) {
    std::string name = command_at(s, pos);
    if (name.empty()) {
      s.erase(pos, 1);  // drop the backslash of an escaped char
      ++pos;
      continue;
    }
    s.erase(pos, 1 + name.size());
  }
  std::erase(s, '{');
  std::erase(s, '}');
  std::replace(s.begin(), s.end(), '~', ' ');
  return collapse_ws(s);
}

CleanedLatex clean_latex(std::string_view section) {
  CleanedLatex result;
  std::string text = strip_comments(normalize_newlines(section));
  remove_float_envs(text, result.warning);

  MathMasker masker;
  text = masker.mask(std::move(text));

  drop_command_with_arg(
      text, {"label", "footnote", "ref", "eqref", "autoref", "cref", "pageref", "input",
             "include", "includegraphics", "vspace", "hspace", "caption", "bibliography",
             "bibliographystyle", "setlength", "renewcommand", "newcommand"});
  text = replace_cites_with_markers(text);
  resolve_links(text);
  replace_structure(text);
  strip_generic_commands(text);
  unescape_inert(text);
  drop_bare_braces(text);

  text = masker.restore(std::move(text));
  result.text = normalize_whitespace(text);
  return result;
}

std::vector<std::string> extract_citation_keys(std::string_view latex) {
  std::string text = strip_comments(normalize_newlines(latex));
  std::vector<std::string> keys;
  for (const auto& hit : find_cites(text))
    for (const auto& k : hit.keys) keys.push_back(k);
  return keys;
}

RelatedWorkSection extract_related_work(std::string_view latex_source,
                                        const std::vector<std::string>& names) {
  std::string text = normalize_newlines(latex_source);
  std::string scannable = strip_comments(text);
  auto headings = find_headings(scannable);

  const Heading* match = nullptr;
  for (const auto& h : headings) {
    std::string title = to_lower(strip_tex_markup(h.title_raw));
    for (const auto& name : names) {
      if (title.find(to_lower(name)) != std::string::npos) {
        match = &h;
        break;
      }
    }
    if (match) break;
  }
  if (!match)
    throw Error("NotFound", "no related-work heading found in LaTeX source");

  std::size_t body_begin = match->body_pos;
  std::size_t body_end = scannable.size();
  for (const auto& h : headings) {
    if (h.cmd_pos > match->cmd_pos && h.level <= match->level) {
      body_end = h.cmd_pos;
      break;
    }
  }
  // The bibliography or appendix also terminates the section body.
  for (std::string_view stop : {"\\begin{thebibliography}", "\\bibliography{",
                                "\\appendix", "\\end{document}"}) {
    auto p = scannable.find(stop, body_begin);
    if (p != std::string::npos && p < body_end) body_end = p;
  }

  RelatedWorkSection out;
  out.heading = strip_tex_markup(match->title_raw);
  out.raw_latex = scannable.substr(body_begin, body_end - body_begin);
  CleanedLatex cleaned = clean_latex(out.raw_latex);
  out.cleaned = cleaned.text;
  out.clean_warning = cleaned.warning;
  out.citation_keys = extract_citation_keys(out.raw_latex);
  return out;
}

}  // namespace synthbench
