#include "rsr/sparql.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <unordered_set>

namespace rsr {

SyntaxError::SyntaxError(size_t position, const std::string& expected)
    : ConfigError("syntax error at offset " + std::to_string(position) + ": " +
                  expected),
      position(position) {}

UnboundSelectVariable::UnboundSelectVariable(const std::string& name)
    : ConfigError("select variable ?" + name + " does not occur in the body"),
      name(name) {}

namespace {

struct Token {
  enum class Type {
    Iri,
    Pname,      // prefix:local or prefix: (namespace form)
    Var,
    String,     // literal with optional datatype/lang, already assembled
    Integer,
    Blank,
    Keyword,    // upper-cased
    LBrace, RBrace, LParen, RParen,
    Dot, Semicolon,
    And, Ge, Lt,
    End,
  };
  Type type;
  std::string text;
  Term literal;  // for String
  uint64_t number = 0;
  size_t pos = 0;
};

bool keyword_char(char c) {
  return std::isalpha(static_cast<unsigned char>(c));
}

bool name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

class Lexer {
 public:
  explicit Lexer(const std::string& text) : s_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_ws_and_comments();
      if (pos_ >= s_.size()) {
        out.push_back({Token::Type::End, "", {}, 0, pos_});
        return out;
      }
      out.push_back(next());
    }
  }

 private:
  void skip_ws_and_comments() {
    while (pos_ < s_.size()) {
      char c = s_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == '#') {
        while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
      } else {
        return;
      }
    }
  }

  [[noreturn]] void fail(const std::string& expected) {
    throw SyntaxError(pos_, expected);
  }

  Token next() {
    const size_t start = pos_;
    char c = s_[pos_];
    switch (c) {
      case '{': ++pos_; return {Token::Type::LBrace, "{", {}, 0, start};
      case '}': ++pos_; return {Token::Type::RBrace, "}", {}, 0, start};
      case '(': ++pos_; return {Token::Type::LParen, "(", {}, 0, start};
      case ')': ++pos_; return {Token::Type::RParen, ")", {}, 0, start};
      case '.': ++pos_; return {Token::Type::Dot, ".", {}, 0, start};
      case ';': ++pos_; return {Token::Type::Semicolon, ";", {}, 0, start};
      default: break;
    }
    if (c == '&') {
      if (pos_ + 1 < s_.size() && s_[pos_ + 1] == '&') {
        pos_ += 2;
        return {Token::Type::And, "&&", {}, 0, start};
      }
      fail("'&&'");
    }
    if (c == '>') {
      if (pos_ + 1 < s_.size() && s_[pos_ + 1] == '=') {
        pos_ += 2;
        return {Token::Type::Ge, ">=", {}, 0, start};
      }
      fail("'>='");
    }
    if (c == '<') {
      // IRI if a '>' closes it before any whitespace, else the < operator.
      size_t i = pos_ + 1;
      while (i < s_.size() && !std::isspace(static_cast<unsigned char>(s_[i])) &&
             s_[i] != '>')
        ++i;
      if (i < s_.size() && s_[i] == '>') {
        std::string iri = s_.substr(pos_ + 1, i - pos_ - 1);
        if (iri.empty()) fail("non-empty IRI");
        pos_ = i + 1;
        return {Token::Type::Iri, std::move(iri), {}, 0, start};
      }
      ++pos_;
      return {Token::Type::Lt, "<", {}, 0, start};
    }
    if (c == '?') {
      size_t i = ++pos_;
      while (pos_ < s_.size() && name_char(s_[pos_])) ++pos_;
      if (pos_ == i) fail("variable name");
      return {Token::Type::Var, s_.substr(i, pos_ - i), {}, 0, start};
    }
    if (c == '"') {
      std::string raw;
      ++pos_;
      while (pos_ < s_.size() && s_[pos_] != '"') {
        if (s_[pos_] == '\\' && pos_ + 1 < s_.size()) {
          raw.push_back(s_[pos_]);
          raw.push_back(s_[pos_ + 1]);
          pos_ += 2;
        } else {
          raw.push_back(s_[pos_++]);
        }
      }
      if (pos_ >= s_.size()) fail("closing '\"'");
      ++pos_;
      std::string datatype, lang;
      if (pos_ + 1 < s_.size() && s_[pos_] == '^' && s_[pos_ + 1] == '^') {
        pos_ += 2;
        if (pos_ >= s_.size() || s_[pos_] != '<') fail("datatype IRI");
        size_t end = s_.find('>', pos_);
        if (end == std::string::npos) fail("closing '>'");
        datatype = s_.substr(pos_ + 1, end - pos_ - 1);
        pos_ = end + 1;
      } else if (pos_ < s_.size() && s_[pos_] == '@') {
        size_t i = ++pos_;
        while (pos_ < s_.size() && name_char(s_[pos_])) ++pos_;
        lang = s_.substr(i, pos_ - i);
      }
      Token t{Token::Type::String, raw, {}, 0, start};
      std::string unescaped;
      for (size_t i = 0; i < raw.size(); ++i) {
        if (raw[i] != '\\') {
          unescaped.push_back(raw[i]);
          continue;
        }
        if (++i >= raw.size()) fail("escape");
        switch (raw[i]) {
          case 't': unescaped.push_back('\t'); break;
          case 'n': unescaped.push_back('\n'); break;
          case 'r': unescaped.push_back('\r'); break;
          case '"': unescaped.push_back('"'); break;
          case '\\': unescaped.push_back('\\'); break;
          default: fail("escape");
        }
      }
      t.literal = Term::literal(std::move(unescaped), std::move(datatype),
                                std::move(lang));
      return t;
    }
    if (c == '_' && pos_ + 1 < s_.size() && s_[pos_ + 1] == ':') {
      size_t i = pos_ + 2;
      size_t j = i;
      while (j < s_.size() && name_char(s_[j])) ++j;
      if (j == i) fail("blank node label");
      pos_ = j;
      return {Token::Type::Blank, s_.substr(i, j - i), {}, 0, start};
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t i = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
        ++pos_;
      Token t{Token::Type::Integer, s_.substr(i, pos_ - i), {}, 0, start};
      t.number = std::stoull(t.text);
      return t;
    }
    if (keyword_char(c)) {
      size_t i = pos_;
      while (pos_ < s_.size() && name_char(s_[pos_])) ++pos_;
      std::string word = s_.substr(i, pos_ - i);
      // prefixed name: word ':' [local]
      if (pos_ < s_.size() && s_[pos_] == ':') {
        ++pos_;
        size_t l = pos_;
        while (pos_ < s_.size() && name_char(s_[pos_])) ++pos_;
        return {Token::Type::Pname, word + ":" + s_.substr(l, pos_ - l), {}, 0,
                start};
      }
      std::string upper = word;
      std::transform(upper.begin(), upper.end(), upper.begin(),
                     [](unsigned char ch) { return std::toupper(ch); });
      return {Token::Type::Keyword, upper, {}, 0, start};
    }
    if (c == ':') {  // default-prefix name
      ++pos_;
      size_t l = pos_;
      while (pos_ < s_.size() && name_char(s_[pos_])) ++pos_;
      return {Token::Type::Pname, ":" + s_.substr(l, pos_ - l), {}, 0, start};
    }
    fail("token");
  }

  const std::string& s_;
  size_t pos_ = 0;
};

class Parser {
 public:
  Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  QueryAst run() {
    QueryAst q;
    while (is_keyword("PREFIX")) {
      advance();
      const Token& ns = expect(Token::Type::Pname, "prefix name");
      std::string prefix = ns.text.substr(0, ns.text.find(':'));
      const Token& iri = expect(Token::Type::Iri, "namespace IRI");
      prefixes_[prefix] = iri.text;
    }
    if (!is_keyword("SELECT")) fail("SELECT");
    advance();
    while (cur().type == Token::Type::Var) {
      q.select_vars.push_back(Variable{cur().text});
      advance();
    }
    if (q.select_vars.empty()) fail("at least one select variable");
    if (!is_keyword("WHERE")) fail("WHERE");
    advance();
    q.body = parse_group();
    if (cur().type != Token::Type::End) fail("end of query");
    return q;
  }

 private:
  const Token& cur() const { return toks_[i_]; }
  void advance() { ++i_; }
  bool is_keyword(const char* k) const {
    return cur().type == Token::Type::Keyword && cur().text == k;
  }
  [[noreturn]] void fail(const std::string& expected) const {
    throw SyntaxError(cur().pos, "expected " + expected);
  }
  const Token& expect(Token::Type t, const char* what) {
    if (cur().type != t) fail(what);
    const Token& tok = cur();
    advance();
    return tok;
  }

  Term expand_pname(const Token& t) const {
    size_t colon = t.text.find(':');
    std::string prefix = t.text.substr(0, colon);
    auto it = prefixes_.find(prefix);
    if (it == prefixes_.end())
      throw SyntaxError(t.pos, "undeclared prefix '" + prefix + "'");
    return Term::iri(it->second + t.text.substr(colon + 1));
  }

  PatternTerm parse_pattern_term(const char* what) {
    const Token& t = cur();
    switch (t.type) {
      case Token::Type::Iri: advance(); return Term::iri(t.text);
      case Token::Type::Pname: advance(); return expand_pname(t);
      case Token::Type::Var: advance(); return Variable{t.text};
      case Token::Type::String: advance(); return t.literal;
      case Token::Type::Blank: advance(); return Term::blank(t.text);
      default: fail(what);
    }
  }

  FilterCondition parse_filter_condition() {
    expect(Token::Type::LParen, "'('");
    FilterCondition cond;
    while (true) {
      const Token& v = expect(Token::Type::Var, "filter variable");
      Comparison cmp;
      cmp.var = Variable{v.text};
      if (cur().type == Token::Type::Ge) {
        cmp.op = Comparison::Op::Ge;
      } else if (cur().type == Token::Type::Lt) {
        cmp.op = Comparison::Op::Lt;
      } else {
        fail("'>=' or '<'");
      }
      advance();
      cmp.value = expect(Token::Type::Integer, "integer bound").number;
      cond.conjuncts.push_back(cmp);
      if (cur().type == Token::Type::And) {
        advance();
        continue;
      }
      break;
    }
    expect(Token::Type::RParen, "')'");
    return cond;
  }

  BodyPtr parse_group() {
    expect(Token::Type::LBrace, "'{'");
    if (cur().type == Token::Type::LBrace) {
      // { group } UNION { group } [UNION { group }]*
      BodyPtr node = parse_group();
      while (is_keyword("UNION")) {
        advance();
        auto u = std::make_unique<BodyNode>();
        u->type = BodyNode::Type::Union;
        u->left = std::move(node);
        u->right = parse_group();
        node = std::move(u);
      }
      expect(Token::Type::RBrace, "'}'");
      return node;
    }

    auto bgp = std::make_unique<BodyNode>();
    bgp->type = BodyNode::Type::Bgp;
    std::vector<FilterCondition> filters;
    while (cur().type != Token::Type::RBrace) {
      if (is_keyword("OPTIONAL"))
        throw SyntaxError(cur().pos, "OPTIONAL is not supported");
      if (is_keyword("FILTER")) {
        advance();
        filters.push_back(parse_filter_condition());
        if (cur().type == Token::Type::Dot) advance();
        continue;
      }
      PatternTerm subject = parse_pattern_term("subject");
      while (true) {
        PatternTerm pred = parse_pattern_term("predicate");
        PatternTerm obj = parse_pattern_term("object");
        bgp->patterns.push_back(TriplePattern{subject, pred, obj});
        if (cur().type == Token::Type::Semicolon) {
          advance();
          continue;
        }
        break;
      }
      if (cur().type == Token::Type::Dot) advance();
    }
    expect(Token::Type::RBrace, "'}'");

    BodyPtr node = std::move(bgp);
    for (FilterCondition& f : filters) {
      auto wrap = std::make_unique<BodyNode>();
      wrap->type = BodyNode::Type::Filter;
      wrap->child = std::move(node);
      wrap->condition = std::move(f);
      node = std::move(wrap);
    }
    return node;
  }

  std::vector<Token> toks_;
  size_t i_ = 0;
  std::map<std::string, std::string> prefixes_;
};

void collect_vars(const BodyNode& node,
                  std::unordered_set<std::string>& vars) {
  switch (node.type) {
    case BodyNode::Type::Bgp:
      for (const TriplePattern& p : node.patterns)
        for (const PatternTerm* t : {&p.s, &p.p, &p.o})
          if (is_variable(*t)) vars.insert(as_variable(*t).name);
      return;
    case BodyNode::Type::Union:
      collect_vars(*node.left, vars);
      collect_vars(*node.right, vars);
      return;
    case BodyNode::Type::Filter:
      collect_vars(*node.child, vars);
      return;
  }
}

void check_filter_scope(const BodyNode& node) {
  switch (node.type) {
    case BodyNode::Type::Bgp:
      return;
    case BodyNode::Type::Union:
      check_filter_scope(*node.left);
      check_filter_scope(*node.right);
      return;
    case BodyNode::Type::Filter: {
      std::unordered_set<std::string> in_scope;
      collect_vars(*node.child, in_scope);
      for (const Comparison& c : node.condition.conjuncts)
        if (!in_scope.count(c.var.name))
          throw SyntaxError(0, "filter variable ?" + c.var.name +
                                   " is not in scope");
      check_filter_scope(*node.child);
      return;
    }
  }
}

struct PragmaSettings {
  std::optional<ReasoningMode> mode;
  std::optional<bool> sameas;
  std::optional<WindowSpec> window;
};

PragmaSettings scan_pragmas(const std::string& text) {
  PragmaSettings out;
  std::istringstream in(text);
  std::string line;
  size_t offset = 0;
  while (std::getline(in, line)) {
    size_t line_start = offset;
    offset += line.size() + 1;
    size_t first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line.compare(first, 7, "#pragma") != 0)
      continue;
    std::istringstream ls(line.substr(first + 7));
    std::string what;
    ls >> what;
    if (what == "reasoning") {
      std::string mode;
      ls >> mode;
      if (mode == "LM")
        out.mode = ReasoningMode::LM;
      else if (mode == "SAM")
        out.mode = ReasoningMode::SAM;
      else if (mode == "NONE")
        out.mode = ReasoningMode::None;
      else
        throw SyntaxError(line_start, "expected reasoning mode LM|SAM|NONE");
    } else if (what == "sameas") {
      std::string flag;
      ls >> flag;
      if (flag == "on")
        out.sameas = true;
      else if (flag == "off")
        out.sameas = false;
      else
        throw SyntaxError(line_start, "expected sameas on|off");
    } else if (what == "window") {
      std::string kind;
      uint64_t n = 0;
      ls >> kind >> n;
      if (!ls || n == 0)
        throw SyntaxError(line_start, "expected window count N|time S");
      WindowSpec w;
      if (kind == "count") {
        w.kind = WindowSpec::Kind::Count;
        w.count = n;
      } else if (kind == "time") {
        w.kind = WindowSpec::Kind::Time;
        w.seconds = n;
      } else {
        throw SyntaxError(line_start, "expected window count N|time S");
      }
      out.window = w;
    } else {
      throw SyntaxError(line_start, "unknown pragma '" + what + "'");
    }
  }
  return out;
}

BodyPtr clone_body(const BodyNode& node) {
  auto out = std::make_unique<BodyNode>();
  out->type = node.type;
  out->patterns = node.patterns;
  out->condition = node.condition;
  if (node.left) out->left = clone_body(*node.left);
  if (node.right) out->right = clone_body(*node.right);
  if (node.child) out->child = clone_body(*node.child);
  return out;
}

}  // namespace

QueryAst QueryAst::clone() const {
  QueryAst q;
  q.name = name;
  q.select_vars = select_vars;
  q.body = body ? clone_body(*body) : nullptr;
  q.mode = mode;
  q.sameas_expansion = sameas_expansion;
  q.window = window;
  return q;
}

namespace {

void collect_patterns(const BodyNode& node, std::vector<TriplePattern>& out) {
  switch (node.type) {
    case BodyNode::Type::Bgp:
      out.insert(out.end(), node.patterns.begin(), node.patterns.end());
      return;
    case BodyNode::Type::Union:
      collect_patterns(*node.left, out);
      collect_patterns(*node.right, out);
      return;
    case BodyNode::Type::Filter:
      collect_patterns(*node.child, out);
      return;
  }
}

}  // namespace

std::vector<TriplePattern> QueryAst::all_patterns() const {
  std::vector<TriplePattern> out;
  if (body) collect_patterns(*body, out);
  return out;
}

QueryAst parse_query(const std::string& text) {
  PragmaSettings pragmas = scan_pragmas(text);
  QueryAst q = Parser(Lexer(text).run()).run();
  if (pragmas.mode) q.mode = *pragmas.mode;
  if (pragmas.sameas) q.sameas_expansion = *pragmas.sameas;
  if (pragmas.window) q.window = *pragmas.window;

  std::unordered_set<std::string> body_vars;
  collect_vars(*q.body, body_vars);
  for (const Variable& v : q.select_vars)
    if (!body_vars.count(v.name)) throw UnboundSelectVariable(v.name);
  check_filter_scope(*q.body);
  return q;
}

namespace {

std::string pattern_term_text(const PatternTerm& t) {
  if (is_variable(t)) return "?" + as_variable(t).name;
  return serialize_term(as_term(t));
}

void print_body(const BodyNode& node, std::ostringstream& out,
                const std::string& indent) {
  switch (node.type) {
    case BodyNode::Type::Bgp:
      for (const TriplePattern& p : node.patterns)
        out << indent << pattern_term_text(p.s) << " " << pattern_term_text(p.p)
            << " " << pattern_term_text(p.o) << " .\n";
      return;
    case BodyNode::Type::Filter: {
      print_body(*node.child, out, indent);
      out << indent << "FILTER (";
      for (size_t i = 0; i < node.condition.conjuncts.size(); ++i) {
        const Comparison& c = node.condition.conjuncts[i];
        if (i) out << " && ";
        out << "?" << c.var.name
            << (c.op == Comparison::Op::Ge ? " >= " : " < ") << c.value;
      }
      out << ") .\n";
      return;
    }
    case BodyNode::Type::Union:
      out << indent << "{\n";
      print_body(*node.left, out, indent + "  ");
      out << indent << "} UNION {\n";
      print_body(*node.right, out, indent + "  ");
      out << indent << "}\n";
      return;
  }
}

bool body_equal(const BodyNode& a, const BodyNode& b) {
  if (a.type != b.type) return false;
  switch (a.type) {
    case BodyNode::Type::Bgp: {
      if (a.patterns.size() != b.patterns.size()) return false;
      for (size_t i = 0; i < a.patterns.size(); ++i) {
        if (a.patterns[i].s != b.patterns[i].s) return false;
        if (a.patterns[i].p != b.patterns[i].p) return false;
        if (a.patterns[i].o != b.patterns[i].o) return false;
      }
      return true;
    }
    case BodyNode::Type::Union:
      return body_equal(*a.left, *b.left) && body_equal(*a.right, *b.right);
    case BodyNode::Type::Filter: {
      if (a.condition.conjuncts.size() != b.condition.conjuncts.size())
        return false;
      for (size_t i = 0; i < a.condition.conjuncts.size(); ++i) {
        const Comparison& x = a.condition.conjuncts[i];
        const Comparison& y = b.condition.conjuncts[i];
        if (x.var != y.var || x.op != y.op || x.value != y.value) return false;
      }
      return body_equal(*a.child, *b.child);
    }
  }
  return false;
}

}  // namespace

std::string print_query(const QueryAst& q) {
  std::ostringstream out;
  out << "#pragma reasoning "
      << (q.mode == ReasoningMode::LM
              ? "LM"
              : q.mode == ReasoningMode::SAM ? "SAM" : "NONE")
      << "\n";
  out << "#pragma sameas " << (q.sameas_expansion ? "on" : "off") << "\n";
  if (q.window.kind == WindowSpec::Kind::Count)
    out << "#pragma window count " << q.window.count << "\n";
  else
    out << "#pragma window time " << q.window.seconds << "\n";
  out << "SELECT";
  for (const Variable& v : q.select_vars) out << " ?" << v.name;
  out << " WHERE {\n";
  print_body(*q.body, out, "  ");
  out << "}\n";
  return out.str();
}

bool ast_equal(const QueryAst& a, const QueryAst& b) {
  if (a.select_vars != b.select_vars || a.mode != b.mode ||
      a.sameas_expansion != b.sameas_expansion ||
      a.window.kind != b.window.kind)
    return false;
  if (a.window.kind == WindowSpec::Kind::Count &&
      a.window.count != b.window.count)
    return false;
  if (a.window.kind == WindowSpec::Kind::Time &&
      a.window.seconds != b.window.seconds)
    return false;
  return body_equal(*a.body, *b.body);
}

std::map<std::string, QueryAst> builtin_queries() {
  static const char* kPrefixes =
      "PREFIX rdf: <http://www.w3.org/1999/02/22-rdf-syntax-ns#>\n"
      "PREFIX lubm: <http://swat.cse.lehigh.edu/onto/univ-bench.owl#>\n";
  std::map<std::string, std::string> texts;
  texts["Q1"] =
      "SELECT ?n WHERE {\n"
      " ?x rdf:type lubm:Professor; lubm:name ?n.}\n";
  texts["Q2"] =
      "SELECT ?ns ?nx WHERE {\n"
      " ?x rdf:type lubm:Professor; lubm:name ?nx.\n"
      " ?s lubm:advisor ?x; rdf:type lubm:Student.\n"
      " ?s lubm:name ?ns. }\n";
  texts["Q3"] = "SELECT ?x ?o  WHERE { ?x lubm:memberOf ?o.}\n";
  texts["Q4"] =
      "SELECT ?o ?n WHERE { \n"
      "?x rdf:type lubm:Professor; lubm:memberOf ?o;\n"
      "lubm:name ?n.}\n";
  texts["Q5"] =
      "SELECT ?ns ?nx ?o WHERE {\n"
      " ?x rdf:type lubm:Professor; lubm:name ?nx;\n"
      " lubm:memberOf ?o.\n"
      " ?s lubm:advisor ?x; rdf:type lubm:Student;\n"
      " lubm:name ?ns. }\n";
  texts["Q6"] =
      "#pragma sameas on\n"
      "SELECT ?n ?e WHERE { ?x rdf:type lubm:PostDoc;\n"
      " lubm:name ?n; lubm:emailAddress ?e.}\n";
  texts["Q7"] =
      "#pragma sameas on\n"
      "SELECT ?o ?n WHERE {\n"
      " ?x rdf:type lubm:Faculty; lubm:memberOf ?o; \n"
      " lubm:name ?n.}\n";
  texts["Q8"] =
      "#pragma sameas on\n"
      "SELECT ?ns ?nx ?o WHERE { \n"
      " ?x rdf:type lubm:Faculty; lubm:name ?nx; \n"
      " lubm:memberOf ?o. \n"
      " ?s lubm:advisor ?x; rdf:type lubm:Student;\n"
      " lubm:name ?ns.}\n";

  std::map<std::string, QueryAst> out;
  for (auto& [name, body] : texts) {
    QueryAst q = parse_query(kPrefixes + body);
    q.name = name;
    out.emplace(name, std::move(q));
  }
  return out;
}

}  // namespace rsr
