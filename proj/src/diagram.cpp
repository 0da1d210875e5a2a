#include "pmc/diagram.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <optional>
#include <sstream>

namespace pmc {

// ---------------------------------------------------------------------------
// Terms

namespace term {

namespace {
std::shared_ptr<Term> node(TermKind kind) {
  auto t = std::make_shared<Term>();
  t->kind = kind;
  return t;
}
}  // namespace

TermPtr gen(std::string name, SourcePos pos) {
  auto t = node(TermKind::gen);
  t->name = std::move(name);
  t->pos = pos;
  return t;
}

TermPtr id(FinObject x) {
  auto t = node(TermKind::id);
  t->object = std::move(x);
  return t;
}

TermPtr seq(TermPtr a, TermPtr b) {
  auto t = node(TermKind::seq);
  t->pos = a->pos;
  t->left = std::move(a);
  t->right = std::move(b);
  return t;
}

TermPtr par(TermPtr a, TermPtr b) {
  auto t = node(TermKind::par);
  t->pos = a->pos;
  t->left = std::move(a);
  t->right = std::move(b);
  return t;
}

TermPtr copy(FinObject x) {
  auto t = node(TermKind::copy);
  t->object = std::move(x);
  return t;
}

TermPtr discard(FinObject x) {
  auto t = node(TermKind::discard);
  t->object = std::move(x);
  return t;
}

TermPtr swap(FinObject x, FinObject y) {
  auto t = node(TermKind::swap);
  t->object = std::move(x);
  t->object2 = std::move(y);
  return t;
}

TermPtr compare(FinObject x) {
  auto t = node(TermKind::compare);
  t->object = std::move(x);
  return t;
}

TermPtr observe(FinObject x, Label label) {
  auto t = node(TermKind::observe);
  t->object = std::move(x);
  t->label = std::move(label);
  return t;
}

}  // namespace term

namespace {

std::string labelText(const Label& l) {
  if (l.size() == 1) return l.front();
  std::string out = "(";
  for (std::size_t i = 0; i < l.size(); ++i) out += (i ? "," : "") + l[i];
  return out + ")";
}

}  // namespace

std::string toString(const TermPtr& t) {
  switch (t->kind) {
    case TermKind::gen: return t->name;
    case TermKind::id: return "id[" + t->object.name() + "]";
    case TermKind::seq: return "(" + toString(t->left) + " ; " + toString(t->right) + ")";
    case TermKind::par: return "(" + toString(t->left) + " * " + toString(t->right) + ")";
    case TermKind::copy: return "copy[" + t->object.name() + "]";
    case TermKind::discard: return "discard[" + t->object.name() + "]";
    case TermKind::swap: return "swap[" + t->object.name() + ", " + t->object2.name() + "]";
    case TermKind::compare: return "compare[" + t->object.name() + "]";
    case TermKind::observe: return "observe[" + t->object.name() + " = " + labelText(t->label) + "]";
  }
  return {};
}

// ---------------------------------------------------------------------------
// Model

void Model::addObject(const std::string& name, FinObject x) {
  if (name == "I") throw ValidationError("'I' is reserved for the unit object");
  if (!objects_.emplace(name, std::move(x)).second) {
    throw ValidationError("duplicate object '" + name + "'");
  }
}

bool Model::hasMorphism(const std::string& name) const {
  return kernels_.count(name) || states_.count(name) || diagrams_.count(name);
}

void Model::addKernel(const std::string& name, SubKernel k) {
  if (hasMorphism(name)) throw ValidationError("duplicate name '" + name + "'");
  kernels_.emplace(name, std::move(k));
}

void Model::addState(const std::string& name, SubKernel s) {
  if (!s.dom().isUnit()) throw ValidationError("state '" + name + "' must have domain I");
  if (hasMorphism(name)) throw ValidationError("duplicate name '" + name + "'");
  states_.emplace(name, std::move(s));
}

void Model::addDiagram(const std::string& name, DiagramDecl d) {
  if (hasMorphism(name)) throw ValidationError("duplicate name '" + name + "'");
  diagrams_.emplace(name, std::move(d));
}

const FinObject* Model::findObject(const std::string& name) const {
  auto it = objects_.find(name);
  return it == objects_.end() ? nullptr : &it->second;
}

ParseError::ParseError(std::vector<Diagnostic> diagnostics)
    : Error([&] {
        std::ostringstream msg;
        for (std::size_t i = 0; i < diagnostics.size(); ++i) {
          if (i) msg << '\n';
          msg << diagnostics[i].line << ':' << diagnostics[i].column << ": "
              << diagnostics[i].message;
        }
        return msg.str();
      }()),
      diagnostics_(std::move(diagnostics)) {}

// ---------------------------------------------------------------------------
// Typing and evaluation

Signature typecheck(const TermPtr& t, const Model& model) {
  switch (t->kind) {
    case TermKind::gen: {
      if (auto it = model.kernels().find(t->name); it != model.kernels().end()) {
        return {it->second.dom(), it->second.cod()};
      }
      if (auto it = model.states().find(t->name); it != model.states().end()) {
        return {it->second.dom(), it->second.cod()};
      }
      if (auto it = model.diagrams().find(t->name); it != model.diagrams().end()) {
        return it->second.signature;
      }
      throw TypeError(t->pos, "unknown generator '" + t->name + "'");
    }
    case TermKind::id: return {t->object, t->object};
    case TermKind::seq: {
      const Signature a = typecheck(t->left, model);
      const Signature b = typecheck(t->right, model);
      if (!(a.cod == b.dom)) {
        throw TypeError(t->right->pos, "boundary mismatch in sequential composition: " +
                                           a.cod.name() + " != " + b.dom.name());
      }
      return {a.dom, b.cod};
    }
    case TermKind::par: {
      const Signature a = typecheck(t->left, model);
      const Signature b = typecheck(t->right, model);
      return {tensor(a.dom, b.dom), tensor(a.cod, b.cod)};
    }
    case TermKind::copy: return {t->object, tensor(t->object, t->object)};
    case TermKind::discard: return {t->object, FinObject::unit()};
    case TermKind::swap:
      return {tensor(t->object, t->object2), tensor(t->object2, t->object)};
    case TermKind::compare: return {tensor(t->object, t->object), t->object};
    case TermKind::observe:
      if (!t->object.find(t->label)) {
        throw TypeError(t->pos, "label " + labelText(t->label) + " is not in object " +
                                    t->object.name());
      }
      return {t->object, FinObject::unit()};
  }
  throw TypeError(t->pos, "malformed term");
}

namespace {

SubKernel eval(const TermPtr& t, const Model& model) {
  switch (t->kind) {
    case TermKind::gen: return evaluateName(t->name, model);
    case TermKind::id: return identity(t->object);
    case TermKind::seq: return compose(eval(t->left, model), eval(t->right, model));
    case TermKind::par: return tensor(eval(t->left, model), eval(t->right, model));
    case TermKind::copy: return copy(t->object);
    case TermKind::discard: return discard(t->object);
    case TermKind::swap: return swap(t->object, t->object2);
    case TermKind::compare: return compare(t->object);
    case TermKind::observe: return observe(t->object, t->label);
  }
  throw TypeError(t->pos, "malformed term");
}

}  // namespace

SubKernel evaluate(const TermPtr& t, const Model& model) {
  typecheck(t, model);
  return eval(t, model);
}

SubKernel evaluateName(const std::string& name, const Model& model) {
  if (auto it = model.kernels().find(name); it != model.kernels().end()) return it->second;
  if (auto it = model.states().find(name); it != model.states().end()) return it->second;
  if (auto it = model.diagrams().find(name); it != model.diagrams().end()) {
    return eval(it->second.term, model);
  }
  throw TypeError({}, "unknown generator '" + name + "'");
}

// ---------------------------------------------------------------------------
// Lexer

namespace {

enum class Tok { word, punct, arrow, end };

struct Token {
  Tok kind = Tok::end;
  std::string text;
  SourcePos pos;
};

bool isWordChar(unsigned char c) {
  return std::isalnum(c) || c == '_' || c == '.' || c == '\'' || c >= 0x80;
}

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> run(std::vector<Diagnostic>& diagnostics) {
    std::vector<Token> out;
    while (true) {
      skipSpace();
      const SourcePos pos{line_, col_};
      if (i_ >= text_.size()) {
        out.push_back({Tok::end, "", pos});
        return out;
      }
      const char c = text_[i_];
      if (c == '-' && peek(1) == '>') {
        advance(2);
        out.push_back({Tok::arrow, "->", pos});
      } else if (c == '-' && (std::isdigit(static_cast<unsigned char>(peek(1))) || peek(1) == '.')) {
        advance(1);
        out.push_back({Tok::word, "-" + word(), pos});
      } else if (isWordChar(static_cast<unsigned char>(c))) {
        out.push_back({Tok::word, word(), pos});
      } else if (std::string_view("={},:()[];*").find(c) != std::string_view::npos) {
        advance(1);
        out.push_back({Tok::punct, std::string(1, c), pos});
      } else {
        diagnostics.push_back({pos.line, pos.column, std::string("unexpected character '") + c + "'"});
        advance(1);
      }
    }
  }

 private:
  char peek(std::size_t k) const { return i_ + k < text_.size() ? text_[i_ + k] : '\0'; }

  void advance(std::size_t n) {
    for (std::size_t k = 0; k < n && i_ < text_.size(); ++k, ++i_) {
      if (text_[i_] == '\n') {
        ++line_;
        col_ = 1;
      } else if ((static_cast<unsigned char>(text_[i_]) & 0xC0) != 0x80) {
        ++col_;
      }
    }
  }

  void skipSpace() {
    while (i_ < text_.size()) {
      const char c = text_[i_];
      if (c == '#') {
        while (i_ < text_.size() && text_[i_] != '\n') advance(1);
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance(1);
      } else {
        return;
      }
    }
  }

  // Words double as labels and numbers; an exponent sign is kept when the
  // word so far is numeric.
  std::string word() {
    std::string out;
    while (i_ < text_.size()) {
      const char c = text_[i_];
      if (isWordChar(static_cast<unsigned char>(c))) {
        out += c;
        advance(1);
      } else if ((c == '+' || c == '-') && !out.empty() && (out.back() == 'e' || out.back() == 'E') &&
                 (std::isdigit(static_cast<unsigned char>(out.front())) || out.front() == '.')) {
        out += c;
        advance(1);
      } else {
        break;
      }
    }
    return out;
  }

  std::string_view text_;
  std::size_t i_ = 0;
  int line_ = 1;
  int col_ = 1;
};

// ---------------------------------------------------------------------------
// Parser

struct Abort {};

class Parser {
 public:
  Parser(std::vector<Token> tokens, Model& model, std::vector<Diagnostic>& diagnostics)
      : toks_(std::move(tokens)), model_(model), diags_(diagnostics) {}

  void parseModel() {
    while (cur().kind != Tok::end) {
      const std::size_t start = i_;
      try {
        statement();
      } catch (const Abort&) {
        if (i_ == start) ++i_;
        recover();
      }
    }
  }

  TermPtr parseSingleTerm() {
    TermPtr t = termExpr();
    if (cur().kind != Tok::end) fail(cur().pos, "unexpected '" + cur().text + "' after term");
    return t;
  }

 private:
  const Token& cur() const { return toks_[i_]; }
  const Token& at(std::size_t k) const { return toks_[std::min(i_ + k, toks_.size() - 1)]; }

  [[noreturn]] void fail(SourcePos pos, const std::string& message) {
    diags_.push_back({pos.line, pos.column, message});
    throw Abort{};
  }

  bool isPunct(const char* p) const { return cur().kind == Tok::punct && cur().text == p; }

  void expectPunct(const char* p) {
    if (!isPunct(p)) fail(cur().pos, std::string("expected '") + p + "', found " + describe(cur()));
    ++i_;
  }

  void expectArrow() {
    if (cur().kind != Tok::arrow) fail(cur().pos, "expected '->', found " + describe(cur()));
    ++i_;
  }

  static std::string describe(const Token& t) {
    if (t.kind == Tok::end) return "end of input";
    return "'" + t.text + "'";
  }

  std::string name() {
    if (cur().kind != Tok::word) fail(cur().pos, "expected a name, found " + describe(cur()));
    return toks_[i_++].text;
  }

  bool startsStatement(std::size_t k) const {
    const Token& t = at(k);
    if (t.kind != Tok::word) return false;
    if (t.text != "object" && t.text != "kernel" && t.text != "state" && t.text != "diagram") {
      return false;
    }
    const Token& sep = at(k + 2);
    return at(k + 1).kind == Tok::word && sep.kind == Tok::punct &&
           (sep.text == "=" || sep.text == ":");
  }

  void recover() {
    while (cur().kind != Tok::end && !startsStatement(0)) ++i_;
  }

  void statement() {
    const Token& kw = cur();
    if (kw.kind != Tok::word) fail(kw.pos, "expected a declaration, found " + describe(kw));
    if (kw.text == "object") return objectDecl();
    if (kw.text == "kernel") return kernelDecl();
    if (kw.text == "state") return stateDecl();
    if (kw.text == "diagram") return diagramDecl();
    fail(kw.pos, "expected 'object', 'kernel', 'state' or 'diagram', found " + describe(kw));
  }

  void declare(SourcePos pos, const std::function<void()>& add) {
    try {
      add();
    } catch (const Error& e) {
      fail(pos, e.what());
    }
  }

  void objectDecl() {
    ++i_;
    const SourcePos pos = cur().pos;
    const std::string n = name();
    expectPunct("=");
    expectPunct("{");
    std::vector<std::string> labels{name()};
    while (isPunct(",")) {
      ++i_;
      labels.push_back(name());
    }
    expectPunct("}");
    declare(pos, [&] { model_.addObject(n, FinObject::atomic(n, labels)); });
  }

  FinObject objExpr() {
    FinObject x = objAtom();
    while (isPunct("*")) {
      ++i_;
      x = tensor(x, objAtom());
    }
    return x;
  }

  FinObject objAtom() {
    const SourcePos pos = cur().pos;
    const std::string n = name();
    if (n == "I") return FinObject::unit();
    const FinObject* x = model_.findObject(n);
    if (!x) fail(pos, "unknown object '" + n + "'");
    return *x;
  }

  Label labelTuple() {
    if (isPunct("(")) {
      ++i_;
      Label l;
      if (!isPunct(")")) {
        l.push_back(name());
        while (isPunct(",")) {
          ++i_;
          l.push_back(name());
        }
      }
      expectPunct(")");
      return l;
    }
    return {name()};
  }

  std::size_t resolveLabel(const FinObject& x, const Label& l, SourcePos pos) {
    if (auto i = x.find(l)) return *i;
    fail(pos, "label " + labelText(l) + " is not in object " + x.name());
  }

  double number() {
    const Token& t = cur();
    if (t.kind != Tok::word) fail(t.pos, "expected a number, found " + describe(t));
    const char* first = t.text.data();
    const char* last = first + t.text.size();
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) fail(t.pos, "invalid number '" + t.text + "'");
    ++i_;
    return v;
  }

  // weighted ("," weighted)* inside braces, accumulated into `row`.
  void weights(const FinObject& cod, std::span<double> row) {
    expectPunct("{");
    std::vector<bool> seen(row.size(), false);
    while (true) {
      const SourcePos pos = cur().pos;
      const Label l = labelTuple();
      const std::size_t j = resolveLabel(cod, l, pos);
      if (seen[j]) fail(pos, "duplicate output label " + labelText(l));
      seen[j] = true;
      expectPunct(":");
      row[j] = number();
      if (!isPunct(",")) break;
      ++i_;
    }
    expectPunct("}");
  }

  void kernelDecl() {
    ++i_;
    const SourcePos pos = cur().pos;
    const std::string n = name();
    expectPunct(":");
    const FinObject dom = objExpr();
    expectArrow();
    const FinObject cod = objExpr();
    expectPunct("=");
    expectPunct("{");
    std::vector<double> w(dom.size() * cod.size(), 0.0);
    std::vector<bool> seen(dom.size(), false);
    while (true) {
      const SourcePos rowPos = cur().pos;
      const Label l = labelTuple();
      const std::size_t x = resolveLabel(dom, l, rowPos);
      if (seen[x]) fail(rowPos, "duplicate input row " + labelText(l));
      seen[x] = true;
      expectArrow();
      weights(cod, std::span<double>(w.data() + x * cod.size(), cod.size()));
      if (!isPunct(",")) break;
      ++i_;
    }
    expectPunct("}");
    declare(pos, [&] { model_.addKernel(n, SubKernel(dom, cod, std::move(w))); });
  }

  void stateDecl() {
    ++i_;
    const SourcePos pos = cur().pos;
    const std::string n = name();
    expectPunct(":");
    const FinObject cod = objExpr();
    expectPunct("=");
    std::vector<double> w(cod.size(), 0.0);
    weights(cod, w);
    declare(pos, [&] { model_.addState(n, SubKernel(FinObject::unit(), cod, std::move(w))); });
  }

  void diagramDecl() {
    ++i_;
    const SourcePos pos = cur().pos;
    const std::string n = name();
    expectPunct(":");
    const FinObject dom = objExpr();
    expectArrow();
    const FinObject cod = objExpr();
    expectPunct("=");
    const TermPtr t = termExpr();
    Signature sig;
    try {
      sig = typecheck(t, model_);
    } catch (const TypeError& e) {
      fail(e.pos().line ? e.pos() : pos, e.what());
    }
    if (!(sig.dom == dom) || !(sig.cod == cod)) {
      fail(pos, "diagram '" + n + "' is declared " + dom.name() + " -> " + cod.name() +
                    " but its term has type " + sig.dom.name() + " -> " + sig.cod.name());
    }
    declare(pos, [&] { model_.addDiagram(n, {{dom, cod}, t}); });
  }

  // term := par (";" par)*   par := primary ("*" primary)*
  TermPtr termExpr() {
    TermPtr t = parTerm();
    while (isPunct(";")) {
      ++i_;
      t = term::seq(t, parTerm());
    }
    return t;
  }

  TermPtr parTerm() {
    TermPtr t = primary();
    while (isPunct("*")) {
      ++i_;
      t = term::par(t, primary());
    }
    return t;
  }

  TermPtr primary() {
    const Token& tok = cur();
    const SourcePos pos = tok.pos;
    if (isPunct("(")) {
      ++i_;
      TermPtr t = termExpr();
      expectPunct(")");
      return t;
    }
    if (tok.kind != Tok::word) fail(pos, "expected a term, found " + describe(tok));
    const bool bracket = at(1).kind == Tok::punct && at(1).text == "[";
    const std::string word = tok.text;
    if (!bracket) {
      ++i_;
      return term::gen(word, pos);
    }
    i_ += 2;
    std::shared_ptr<Term> t;
    auto with = [&](TermPtr p) {
      auto copy = std::make_shared<Term>(*p);
      copy->pos = pos;
      return copy;
    };
    if (word == "id") {
      t = with(term::id(objExpr()));
    } else if (word == "copy") {
      t = with(term::copy(objExpr()));
    } else if (word == "discard") {
      t = with(term::discard(objExpr()));
    } else if (word == "compare") {
      t = with(term::compare(objExpr()));
    } else if (word == "swap") {
      const FinObject x = objExpr();
      expectPunct(",");
      t = with(term::swap(x, objExpr()));
    } else if (word == "observe") {
      const FinObject x = objExpr();
      expectPunct("=");
      const SourcePos lpos = cur().pos;
      const Label l = labelTuple();
      resolveLabel(x, l, lpos);
      t = with(term::observe(x, l));
    } else {
      fail(pos, "unknown primitive '" + word + "['");
    }
    expectPunct("]");
    return t;
  }

  std::vector<Token> toks_;
  std::size_t i_ = 0;
  Model& model_;
  std::vector<Diagnostic>& diags_;
};

}  // namespace

Model parse(std::string_view text) {
  std::vector<Diagnostic> diagnostics;
  std::vector<Token> tokens = Lexer(text).run(diagnostics);
  Model model;
  Parser(std::move(tokens), model, diagnostics).parseModel();
  if (!diagnostics.empty()) throw ParseError(std::move(diagnostics));
  return model;
}

TermPtr parseTerm(std::string_view text, const Model& model) {
  std::vector<Diagnostic> diagnostics;
  std::vector<Token> tokens = Lexer(text).run(diagnostics);
  Model scratch = model;
  TermPtr t;
  try {
    t = Parser(std::move(tokens), scratch, diagnostics).parseSingleTerm();
  } catch (const Abort&) {
  }
  if (!diagnostics.empty()) throw ParseError(std::move(diagnostics));
  return t;
}

}  // namespace pmc
