#include "repair_miner/mini_java.hpp"

#include "repair_miner/errors.hpp"

#include <array>
#include <cctype>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace repair_miner {

namespace {

enum class TokenKind { identifier, keyword, number, string, op, end };

struct Token {
  TokenKind kind;
  std::string text;
  std::size_t line;
  std::size_t column;
  std::size_t end_column;
};

const std::set<std::string, std::less<>> &keywords() {
  static const std::set<std::string, std::less<>> set = {
      "abstract", "assert",     "boolean",   "break",     "byte",
      "case",     "catch",      "char",      "class",     "const",
      "continue", "default",    "do",        "double",    "else",
      "enum",     "extends",    "final",     "finally",   "float",
      "for",      "goto",       "if",        "implements", "import",
      "instanceof", "int",      "interface", "long",      "native",
      "new",      "package",    "private",   "protected", "public",
      "return",   "short",      "static",    "strictfp",  "super",
      "switch",   "synchronized", "this",    "throw",     "throws",
      "transient", "try",       "void",      "volatile",  "while",
      "true",     "false",      "null"};
  return set;
}

bool is_modifier(std::string_view text) {
  static const std::set<std::string, std::less<>> set = {
      "public",    "protected", "private", "static",   "final",
      "abstract",  "synchronized", "native", "transient", "volatile",
      "strictfp"};
  return set.count(text) > 0;
}

bool is_primitive(std::string_view text) {
  static const std::set<std::string, std::less<>> set = {
      "boolean", "byte", "char", "short", "int", "long", "float", "double"};
  return set.count(text) > 0;
}

bool is_assignment_op(std::string_view text) {
  static const std::set<std::string, std::less<>> set = {
      "=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<=", ">>=", ">>>="};
  return set.count(text) > 0;
}

// ---------------------------------------------------------------------------
// Lexer

class Lexer {
public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_trivia();
      if (pos_ >= src_.size()) {
        out.push_back({TokenKind::end, "", line_, column_, column_});
        return out;
      }
      out.push_back(next());
    }
  }

private:
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void skip_trivia() {
    while (pos_ < src_.size()) {
      const char c = peek();
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '/' && peek(1) == '/') {
        while (pos_ < src_.size() && peek() != '\n')
          advance();
      } else if (c == '/' && peek(1) == '*') {
        const auto line = line_, column = column_;
        advance();
        advance();
        while (pos_ < src_.size() && !(peek() == '*' && peek(1) == '/'))
          advance();
        if (pos_ >= src_.size())
          throw ParseError("unterminated comment", line, column);
        advance();
        advance();
      } else {
        return;
      }
    }
  }

  Token finish(TokenKind kind, std::size_t begin, std::size_t line,
               std::size_t column) {
    Token t{kind, std::string(src_.substr(begin, pos_ - begin)), line, column,
            column_ - 1};
    if (kind == TokenKind::identifier && keywords().count(t.text))
      t.kind = TokenKind::keyword;
    return t;
  }

  Token next() {
    const std::size_t begin = pos_;
    const auto line = line_, column = column_;
    const char c = peek();

    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$') {
      while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' ||
             peek() == '$')
        advance();
      return finish(TokenKind::identifier, begin, line, column);
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
      while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '.' ||
             peek() == '_') {
        const char d = peek();
        advance();
        if ((d == 'e' || d == 'E' || d == 'p' || d == 'P') &&
            (peek() == '+' || peek() == '-'))
          advance();
      }
      return finish(TokenKind::number, begin, line, column);
    }
    if (c == '"' || c == '\'') {
      if (c == '"' && peek(1) == '"' && peek(2) == '"')
        throw UnsupportedConstruct("text block", line, column);
      advance();
      while (pos_ < src_.size() && peek() != c && peek() != '\n') {
        if (peek() == '\\')
          advance();
        advance();
      }
      if (peek() != c)
        throw ParseError("unterminated literal", line, column);
      advance();
      return finish(TokenKind::string, begin, line, column);
    }

    static constexpr std::array<std::string_view, 27> operators = {
        ">>>=", "<<=", ">>=", ">>>", "...", "==", "!=", "<=", ">=",
        "&&",   "||",  "++",  "--",  "+=",  "-=", "*=", "/=", "%=",
        "&=",   "|=",  "^=",  "->",  "::",  "<<", ">>", "<",  ">"};
    for (auto op : operators) {
      if (src_.substr(pos_, op.size()) == op) {
        for (std::size_t i = 0; i < op.size(); ++i)
          advance();
        return finish(TokenKind::op, begin, line, column);
      }
    }
    static constexpr std::string_view singles = "+-*/%=!~?:&|^@(){}[];,.";
    if (singles.find(c) != std::string_view::npos) {
      advance();
      return finish(TokenKind::op, begin, line, column);
    }
    throw ParseError(std::string("unexpected character '") + c + "'", line,
                     column);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
};

// ---------------------------------------------------------------------------
// Text normalization

bool word_like(const Token &t) {
  return t.kind == TokenKind::identifier || t.kind == TokenKind::keyword ||
         t.kind == TokenKind::number || t.kind == TokenKind::string;
}

bool glue(const Token &a, const Token &b) {
  const auto &x = a.text;
  const auto &y = b.text;
  if (y == ")" || y == "]" || y == "," || y == ";" || y == "." || y == "::")
    return true;
  if (x == "(" || x == "[" || x == "." || x == "!" || x == "~" || x == "@" ||
      x == "::")
    return true;
  if ((y == "(" || y == "[") &&
      (a.kind == TokenKind::identifier || x == "this" || x == "super" ||
       is_primitive(x) || x == ")" || x == "]" || x == ">"))
    return true;
  if ((y == "++" || y == "--") && (word_like(a) || x == ")" || x == "]"))
    return true;
  if ((x == "++" || x == "--") && word_like(b))
    return true;
  return false;
}

std::string join(const std::vector<Token> &tokens, std::size_t from,
                 std::size_t to) {
  std::string out;
  for (std::size_t i = from; i < to; ++i) {
    if (i > from && !glue(tokens[i - 1], tokens[i]))
      out += ' ';
    out += tokens[i].text;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Parser

class Parser {
public:
  Parser(std::vector<Token> tokens, const EntityTaxonomy &taxonomy)
      : toks_(std::move(tokens)), tax_(taxonomy) {}

  TreeNode compilation_unit() {
    std::vector<TreeNode> types;
    if (at("package")) {
      while (!at(";"))
        step();
      step();
    }
    while (at("import")) {
      while (!at(";"))
        step();
      step();
    }
    while (!at_end()) {
      if (at(";")) {
        step();
        continue;
      }
      types.push_back(type_declaration());
    }
    SourceRange range{1, 1, 1, 1};
    if (!types.empty())
      range = SourceRange{types.front().range.start_line,
                          types.front().range.start_column,
                          types.back().range.end_line,
                          types.back().range.end_column};
    range.start_line = 1;
    range.start_column = 1;
    return node("CompilationUnit", "", range, std::move(types));
  }

private:
  // -- token helpers --------------------------------------------------------

  const Token &cur() const { return toks_[pos_]; }
  const Token &peek(std::size_t ahead) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  bool at_end() const { return cur().kind == TokenKind::end; }
  bool at(std::string_view text) const {
    return !at_end() && cur().kind != TokenKind::string && cur().text == text;
  }
  bool at_identifier() const { return cur().kind == TokenKind::identifier; }

  const Token &step() {
    if (at_end())
      throw ParseError("unexpected end of input", cur().line, cur().column);
    return toks_[pos_++];
  }

  const Token &expect(std::string_view text) {
    if (!at(text))
      fail("expected '" + std::string(text) + "'");
    return step();
  }

  const Token &expect_identifier() {
    if (!at_identifier())
      fail("expected identifier");
    return step();
  }

  [[noreturn]] void fail(const std::string &what) const {
    if (at_end())
      throw ParseError("unexpected end of input (" + what + ")", cur().line,
                       cur().column);
    throw ParseError(what + ", found '" + cur().text + "'", cur().line,
                     cur().column);
  }

  [[noreturn]] void unsupported(const std::string &what) const {
    throw UnsupportedConstruct(what, cur().line, cur().column);
  }

  static SourceRange span(const Token &first, const Token &last) {
    return SourceRange{first.line, first.column, last.line, last.end_column};
  }

  const Token &previous() const { return toks_[pos_ - 1]; }

  TreeNode node(std::string_view parser_name, std::string value,
                SourceRange range, std::vector<TreeNode> children = {}) const {
    return TreeNode{tax_.map_parser_node(parser_name), std::move(value), range,
                    std::move(children)};
  }

  // Skips a balanced group opened by the current token and returns the index
  // one past the closing token.
  void skip_balanced(std::string_view open, std::string_view close) {
    expect(open);
    int depth = 1;
    while (depth > 0) {
      if (at(open))
        ++depth;
      else if (at(close))
        --depth;
      step();
    }
  }

  void skip_annotations() {
    while (at("@")) {
      if (peek(1).text == "interface")
        unsupported("annotation type declaration");
      step();
      expect_identifier();
      while (at(".")) {
        step();
        expect_identifier();
      }
      if (at("("))
        skip_balanced("(", ")");
    }
  }

  std::vector<TreeNode> modifiers() {
    std::vector<TreeNode> out;
    for (;;) {
      skip_annotations();
      if (cur().kind == TokenKind::keyword && is_modifier(cur().text)) {
        const auto &t = step();
        out.push_back(node("Modifier", t.text, span(t, t)));
      } else {
        return out;
      }
    }
  }

  // Consumes a type at the current position; returns false (without
  // consuming) when no type starts here.
  bool type() {
    const std::size_t start = pos_;
    if (cur().kind == TokenKind::keyword &&
        (is_primitive(cur().text) || cur().text == "void")) {
      step();
    } else if (at_identifier()) {
      step();
      while (at(".") && peek(1).kind == TokenKind::identifier) {
        step();
        step();
      }
      if (at("<") && !type_arguments()) {
        pos_ = start;
        return false;
      }
      while (at(".") && peek(1).kind == TokenKind::identifier) {
        step();
        step();
        if (at("<") && !type_arguments()) {
          pos_ = start;
          return false;
        }
      }
    } else {
      return false;
    }
    while (at("[") && peek(1).text == "]") {
      step();
      step();
    }
    return true;
  }

  bool type_arguments() {
    int depth = 0;
    do {
      if (at_end())
        return false;
      const auto &t = cur().text;
      if (t == "<")
        ++depth;
      else if (t == ">")
        --depth;
      else if (t == ">>")
        depth -= 2;
      else if (t == ">>>")
        depth -= 3;
      else if (!(cur().kind == TokenKind::identifier ||
                 cur().kind == TokenKind::keyword || t == "," || t == "." ||
                 t == "?" || t == "[" || t == "]" || t == "&"))
        return false;
      step();
    } while (depth > 0);
    return depth == 0;
  }

  // -- declarations ---------------------------------------------------------

  TreeNode type_declaration() {
    skip_annotations();
    const std::size_t mods_start = pos_;
    auto mods = modifiers();
    if (at("interface") || at("enum") || at("record"))
      unsupported(cur().text);
    if (!at("class"))
      fail("expected type declaration");
    const Token &start = toks_[mods.empty() ? pos_ : mods_start];
    return class_declaration(start, std::move(mods));
  }

  TreeNode class_declaration(const Token &start, std::vector<TreeNode> mods) {
    expect("class");
    const std::string name = expect_identifier().text;
    if (at("<"))
      if (!type_arguments())
        fail("malformed type parameters");
    std::vector<TreeNode> children = std::move(mods);
    if (at("extends")) {
      step();
      const std::size_t from = pos_;
      if (!type())
        fail("expected superclass type");
      children.push_back(node("SuperclassType", join(toks_, from, pos_),
                              span(toks_[from], previous())));
    }
    if (at("implements")) {
      step();
      do {
        if (at(","))
          step();
        const std::size_t from = pos_;
        if (!type())
          fail("expected interface type");
        children.push_back(node("SuperInterfaceType", join(toks_, from, pos_),
                                span(toks_[from], previous())));
      } while (at(","));
    }
    expect("{");
    while (!at("}")) {
      if (at_end())
        fail("expected '}'");
      if (at(";")) {
        step();
        continue;
      }
      member(children);
    }
    const Token &close = step();
    return node("TypeDeclaration", name, span(start, close), std::move(children));
  }

  void member(std::vector<TreeNode> &out) {
    skip_annotations();
    const std::size_t start_index = pos_;
    auto mods = modifiers();
    const Token &start = toks_[start_index];
    if (at("class")) {
      out.push_back(class_declaration(start, std::move(mods)));
      return;
    }
    if (at("interface") || at("enum") || at("record"))
      unsupported(cur().text);
    if (at("{"))
      unsupported("initializer block");
    if (at("<"))
      unsupported("generic method");

    // Constructor: Name '('
    if (at_identifier() && peek(1).text == "(") {
      const std::string name = step().text;
      out.push_back(method_rest(start, name, std::move(mods), std::nullopt));
      return;
    }

    const std::size_t type_from = pos_;
    if (!type())
      fail("expected member declaration");
    const std::size_t type_to = pos_;
    const Token &name_tok = expect_identifier();
    if (at("(")) {
      auto return_type = node("ReturnType", join(toks_, type_from, type_to),
                              span(toks_[type_from], toks_[type_to - 1]));
      out.push_back(
          method_rest(start, name_tok.text, std::move(mods), std::move(return_type)));
      return;
    }
    // Field: consume declarators up to ';' at depth 0.
    std::size_t depth = 0;
    while (!(depth == 0 && at(";"))) {
      if (at_end())
        fail("expected ';'");
      if (at("(") || at("[") || at("{"))
        ++depth;
      else if ((at(")") || at("]") || at("}")) && depth > 0)
        --depth;
      step();
    }
    const std::string value = join(toks_, type_from, pos_);
    const Token &semi = step();
    out.push_back(node("FieldDeclaration", value, span(start, semi), std::move(mods)));
  }

  TreeNode method_rest(const Token &start, const std::string &name,
                       std::vector<TreeNode> mods,
                       std::optional<TreeNode> return_type) {
    std::vector<TreeNode> children = std::move(mods);
    if (return_type)
      children.push_back(std::move(*return_type));
    expect("(");
    bool first_parameter = true;
    while (!at(")")) {
      if (!first_parameter)
        expect(",");
      first_parameter = false;
      skip_annotations();
      if (at("final"))
        step();
      const std::size_t from = pos_;
      if (!type())
        fail("expected parameter type");
      if (at("..."))
        step();
      expect_identifier();
      while (at("[") && peek(1).text == "]") {
        step();
        step();
      }
      children.push_back(node("SingleVariableDeclaration", join(toks_, from, pos_),
                              span(toks_[from], previous())));
    }
    expect(")");
    if (at("throws")) {
      step();
      do {
        if (at(","))
          step();
        if (!type())
          fail("expected exception type");
      } while (at(","));
    }
    if (at(";")) {
      const Token &semi = step();
      return node("MethodDeclaration", name, span(start, semi), std::move(children));
    }
    expect("{");
    while (!at("}")) {
      if (at_end())
        fail("expected '}'");
      for (auto &s : statement())
        children.push_back(std::move(s));
    }
    const Token &close = step();
    return node("MethodDeclaration", name, span(start, close), std::move(children));
  }

  // -- statements -----------------------------------------------------------

  // Returns the statements produced; blocks are flattened.
  std::vector<TreeNode> statement() {
    if (at("{")) {
      step();
      std::vector<TreeNode> out;
      while (!at("}")) {
        if (at_end())
          fail("expected '}'");
        for (auto &s : statement())
          out.push_back(std::move(s));
      }
      step();
      return out;
    }
    if (at(";")) {
      step();
      return {};
    }
    if (at("if"))
      return single(if_statement());
    if (at("while"))
      return single(loop("while", "WhileStatement"));
    if (at("for"))
      return single(loop("for", "ForStatement"));
    if (at("return"))
      return single(simple("ReturnStatement"));
    if (at("throw"))
      return single(simple("ThrowStatement"));
    if (at("break"))
      return single(simple("BreakStatement"));
    if (at("continue"))
      return single(simple("ContinueStatement"));
    if (at("try"))
      return single(try_statement());
    for (auto kw : {"do", "switch", "synchronized", "assert", "class",
                    "interface", "enum", "case", "default", "else", "catch",
                    "finally"})
      if (at(kw))
        unsupported(std::string(kw) + " statement");
    if (at_identifier() && peek(1).text == ":")
      unsupported("labeled statement");
    if (at("@"))
      skip_annotations();

    if (looks_like_declaration()) {
      const std::size_t from = pos_;
      if (at("final"))
        ++pos_;
      const std::size_t text_from = pos_;
      const std::size_t to = until_semicolon();
      const Token &semi = step();
      return single(node("VariableDeclarationStatement",
                         join(toks_, text_from, to), span(toks_[from], semi)));
    }
    return single(expression_statement());
  }

  static std::vector<TreeNode> single(TreeNode n) {
    std::vector<TreeNode> out;
    out.push_back(std::move(n));
    return out;
  }

  // Advances to the ';' that terminates the current statement and returns
  // its index (the ';' itself is not consumed).
  std::size_t until_semicolon() {
    int depth = 0;
    while (!(depth == 0 && at(";"))) {
      if (at_end())
        fail("expected ';'");
      if (at("(") || at("[") || at("{"))
        ++depth;
      else if (at(")") || at("]") || at("}")) {
        if (depth == 0)
          fail("unbalanced '" + cur().text + "'");
        --depth;
      }
      step();
    }
    return pos_;
  }

  bool looks_like_declaration() {
    const std::size_t save = pos_;
    if (at("final"))
      step();
    bool ok = false;
    if (type() && at_identifier()) {
      step();
      ok = at("=") || at(";") || at(",") || at("[");
    }
    pos_ = save;
    return ok;
  }

  // Condition inside '(' ... ')'; returns normalized text.
  std::string parenthesized() {
    expect("(");
    const std::size_t from = pos_;
    int depth = 1;
    while (true) {
      if (at_end())
        fail("expected ')'");
      if (at("("))
        ++depth;
      else if (at(")") && --depth == 0)
        break;
      step();
    }
    const std::string text = join(toks_, from, pos_);
    step();
    if (text.empty())
      throw ParseError("empty condition", previous().line, previous().column);
    return text;
  }

  TreeNode if_statement() {
    const Token &start = step();
    std::string condition = parenthesized();
    auto children = statement();
    if (at("else")) {
      const Token &else_tok = step();
      auto else_children = statement();
      children.push_back(node("ElseStatement", "else", span(else_tok, previous()),
                              std::move(else_children)));
    }
    return node("IfStatement", std::move(condition), span(start, previous()),
                std::move(children));
  }

  TreeNode loop(std::string_view keyword, std::string_view parser_name) {
    const Token &start = expect(keyword);
    std::string header = parenthesized();
    auto children = statement();
    return node(parser_name, std::move(header), span(start, previous()),
                std::move(children));
  }

  TreeNode simple(std::string_view parser_name) {
    const Token &start = cur();
    const std::size_t from = pos_;
    const std::size_t to = until_semicolon();
    const Token &semi = step();
    return node(parser_name, join(toks_, from, to), span(start, semi));
  }

  TreeNode try_statement() {
    const Token &start = step();
    if (at("("))
      unsupported("try-with-resources");
    if (!at("{"))
      fail("expected '{'");
    auto children = statement();
    bool handled = false;
    while (at("catch")) {
      handled = true;
      const Token &catch_tok = step();
      expect("(");
      if (at("final"))
        step();
      const std::size_t from = pos_;
      do {
        if (at("|"))
          step();
        if (!type())
          fail("expected exception type");
      } while (at("|"));
      expect_identifier();
      const std::string header = join(toks_, from, pos_);
      expect(")");
      if (!at("{"))
        fail("expected '{'");
      auto body = statement();
      children.push_back(
          node("CatchClause", header, span(catch_tok, previous()), std::move(body)));
    }
    if (at("finally")) {
      handled = true;
      const Token &finally_tok = step();
      if (!at("{"))
        fail("expected '{'");
      auto body = statement();
      children.push_back(node("FinallyClause", "finally",
                              span(finally_tok, previous()), std::move(body)));
    }
    if (!handled)
      fail("expected 'catch' or 'finally'");
    return node("TryStatement", "try", span(start, previous()), std::move(children));
  }

  TreeNode expression_statement() {
    const Token &start = cur();
    const std::size_t from = pos_;
    const std::size_t to = until_semicolon();
    const Token &semi = step();
    if (to == from)
      throw ParseError("empty expression", start.line, start.column);

    bool assignment = false;
    bool dot_after_creation = false;
    int depth = 0;
    bool seen_group = false;
    for (std::size_t i = from; i < to; ++i) {
      const auto &t = toks_[i].text;
      if (t == "(" || t == "[" || t == "{") {
        ++depth;
      } else if (t == ")" || t == "]" || t == "}") {
        --depth;
        if (depth == 0 && t == ")")
          seen_group = true;
      } else if (depth == 0 && toks_[i].kind == TokenKind::op) {
        if (is_assignment_op(t))
          assignment = true;
        else if ((t == "." || t == "::") && seen_group)
          dot_after_creation = true;
      }
    }
    std::string value = join(toks_, from, to);
    const SourceRange range = span(start, semi);
    if (assignment)
      return node("Assignment", std::move(value), range);
    const auto &first = toks_[from].text;
    const auto &last = toks_[to - 1].text;
    if (first == "++" || first == "--")
      return node("PrefixExpression", std::move(value), range);
    if (last == "++" || last == "--")
      return node("PostfixExpression", std::move(value), range);
    if (first == "new" && !dot_after_creation && (last == ")" || last == "}"))
      return node("ClassInstanceCreation", std::move(value), range);
    if (last == ")")
      return node("MethodInvocation", std::move(value), range);
    throw UnsupportedConstruct("expression statement", start.line, start.column);
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  const EntityTaxonomy &tax_;
};

} // namespace

SourceTree parse_mini_java(std::string_view source,
                           const EntityTaxonomy &taxonomy) {
  Parser parser(Lexer(source).run(), taxonomy);
  SourceTree tree;
  tree.root = parser.compilation_unit();
  validate(tree, taxonomy);
  return tree;
}

} // namespace repair_miner
