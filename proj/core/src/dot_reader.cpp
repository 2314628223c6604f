#include <cctype>

#include "chainscape/error.hpp"
#include "chainscape/serialize.hpp"

namespace chainscape {

namespace {

struct Token {
  enum Kind { id, punct, arrow, end } kind;
  std::string text;
  std::size_t offset;
};

class DotLexer {
 public:
  explicit DotLexer(std::string_view s) : s_(s) {}

  Token next() {
    skip();
    const std::size_t at = pos_;
    if (pos_ >= s_.size()) return {Token::end, "", at};
    const char c = s_[pos_];
    if (c == '-' && pos_ + 1 < s_.size() && (s_[pos_ + 1] == '>' || s_[pos_ + 1] == '-')) {
      pos_ += 2;
      return {Token::arrow, std::string(s_.substr(at, 2)), at};
    }
    if (std::string_view("{}[];,=:").find(c) != std::string_view::npos) {
      ++pos_;
      return {Token::punct, std::string(1, c), at};
    }
    if (c == '"') return quoted();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_' || static_cast<unsigned char>(c) >= 128) {
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_' ||
                                  static_cast<unsigned char>(s_[pos_]) >= 128)) {
        ++pos_;
      }
      return {Token::id, std::string(s_.substr(at, pos_ - at)), at};
    }
    if (c == '-' || c == '.' || std::isdigit(static_cast<unsigned char>(c))) {
      if (c == '-') ++pos_;
      while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) ++pos_;
      return {Token::id, std::string(s_.substr(at, pos_ - at)), at};
    }
    throw InputError("DOT: unexpected character at offset " + std::to_string(at), at);
  }

 private:
  void skip() {
    while (pos_ < s_.size()) {
      const char c = s_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == '/' && pos_ + 1 < s_.size() && s_[pos_ + 1] == '/') {
        while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
      } else if (c == '#' && (pos_ == 0 || s_[pos_ - 1] == '\n')) {
        while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
      } else if (c == '/' && pos_ + 1 < s_.size() && s_[pos_ + 1] == '*') {
        const auto close = s_.find("*/", pos_ + 2);
        if (close == std::string_view::npos) throw InputError("DOT: unterminated comment", pos_);
        pos_ = close + 2;
      } else {
        return;
      }
    }
  }

  Token quoted() {
    const std::size_t at = pos_++;
    std::string out;
    while (pos_ < s_.size() && s_[pos_] != '"') {
      if (s_[pos_] == '\\' && pos_ + 1 < s_.size()) {
        const char n = s_[pos_ + 1];
        if (n == '"') {
          out += '"';
          pos_ += 2;
          continue;
        }
        if (n == '\n') {
          pos_ += 2;
          continue;
        }
      }
      out += s_[pos_++];
    }
    if (pos_ >= s_.size()) throw InputError("DOT: unterminated string", at);
    ++pos_;
    return {Token::id, out, at};
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

class DotParser {
 public:
  explicit DotParser(std::string_view s) : lex_(s) { advance(); }

  DotGraph run() {
    DotGraph g;
    if (is_keyword("strict")) {
      g.strict = true;
      advance();
    }
    if (is_keyword("digraph")) g.directed = true;
    else if (is_keyword("graph")) g.directed = false;
    else fail("expected 'graph' or 'digraph'");
    advance();
    if (tok_.kind == Token::id) {
      g.name = tok_.text;
      advance();
    }
    expect("{");
    while (!is_punct("}")) {
      if (tok_.kind == Token::end) fail("unexpected end of input");
      statement(g);
      if (is_punct(";")) advance();
    }
    advance();
    if (tok_.kind != Token::end) fail("trailing content after graph");
    return g;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw InputError("DOT: " + msg + " at offset " + std::to_string(tok_.offset), tok_.offset);
  }
  void advance() { tok_ = lex_.next(); }
  bool is_punct(const char* p) const { return tok_.kind == Token::punct && tok_.text == p; }
  bool is_keyword(const char* k) const {
    if (tok_.kind != Token::id) return false;
    if (tok_.text.size() != std::string_view(k).size()) return false;
    for (std::size_t i = 0; i < tok_.text.size(); ++i) {
      if (std::tolower(static_cast<unsigned char>(tok_.text[i])) != k[i]) return false;
    }
    return true;
  }
  void expect(const char* p) {
    if (!is_punct(p)) fail(std::string("expected '") + p + "'");
    advance();
  }
  std::string id() {
    if (tok_.kind != Token::id) fail("expected identifier");
    std::string s = tok_.text;
    advance();
    return s;
  }

  std::map<std::string, std::string> attr_list() {
    std::map<std::string, std::string> attrs;
    while (is_punct("[")) {
      advance();
      while (!is_punct("]")) {
        std::string key = id();
        expect("=");
        attrs[key] = id();
        if (is_punct(",") || is_punct(";")) advance();
      }
      advance();
    }
    return attrs;
  }

  void statement(DotGraph& g) {
    if (is_keyword("subgraph") || is_punct("{")) fail("subgraphs are not supported");
    if (is_keyword("graph") || is_keyword("node") || is_keyword("edge")) {
      const bool graph_attrs = is_keyword("graph");
      advance();
      auto attrs = attr_list();
      if (graph_attrs) g.graph_attrs.insert(attrs.begin(), attrs.end());
      return;
    }
    std::string first = id();
    if (is_punct(":")) fail("ports are not supported");
    if (is_punct("=")) {
      advance();
      g.graph_attrs[first] = id();
      return;
    }
    if (tok_.kind == Token::arrow) {
      std::vector<std::string> chain{first};
      while (tok_.kind == Token::arrow) {
        if ((tok_.text == "->") != g.directed) fail("edge operator does not match graph type");
        advance();
        chain.push_back(id());
      }
      auto attrs = attr_list();
      for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
        g.edges.push_back({chain[i], chain[i + 1], attrs});
        touch(g, chain[i]);
        touch(g, chain[i + 1]);
      }
      return;
    }
    auto attrs = attr_list();
    auto& node = touch(g, first);
    for (auto& [k, v] : attrs) node.attrs[k] = v;
  }

  DotGraph::Node& touch(DotGraph& g, const std::string& name) {
    for (auto& n : g.nodes) {
      if (n.id == name) return n;
    }
    g.nodes.push_back({name, {}});
    return g.nodes.back();
  }

  DotLexer lex_;
  Token tok_{Token::end, "", 0};
};

}  // namespace

DotGraph parse_dot(std::string_view text) { return DotParser(text).run(); }

}  // namespace chainscape
