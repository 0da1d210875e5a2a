#pragma once

// String-diagram terms over named generators, the textual model format, and
// a sum-product evaluator into substochastic kernels.

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "pmc/kernel.hpp"

namespace pmc {

struct SourcePos {
  int line = 0;
  int column = 0;
};

enum class TermKind { gen, id, seq, par, copy, discard, swap, compare, observe };

struct Term;
using TermPtr = std::shared_ptr<const Term>;

/// One node of a diagram. Which fields are meaningful depends on `kind`:
/// `name` for gen, `object` for the primitives (first factor for swap),
/// `object2` for swap, `label` for observe, `left`/`right` for seq and par.
struct Term {
  TermKind kind = TermKind::id;
  std::string name;
  FinObject object;
  FinObject object2;
  Label label;
  TermPtr left;
  TermPtr right;
  SourcePos pos;
};

namespace term {
TermPtr gen(std::string name, SourcePos pos = {});
TermPtr id(FinObject x);
TermPtr seq(TermPtr a, TermPtr b);
TermPtr par(TermPtr a, TermPtr b);
TermPtr copy(FinObject x);
TermPtr discard(FinObject x);
TermPtr swap(FinObject x, FinObject y);
TermPtr compare(FinObject x);
TermPtr observe(FinObject x, Label label);
}  // namespace term

/// Human-readable rendering in the model-file term syntax.
std::string toString(const TermPtr& t);

struct Signature {
  FinObject dom;
  FinObject cod;
};

struct DiagramDecl {
  Signature signature;
  TermPtr term;
};

/// Named objects, kernels, states and diagrams. Kernels, states and diagrams
/// share one namespace; objects have their own.
class Model {
 public:
  void addObject(const std::string& name, FinObject x);
  void addKernel(const std::string& name, SubKernel k);
  void addState(const std::string& name, SubKernel s);
  void addDiagram(const std::string& name, DiagramDecl d);

  const FinObject* findObject(const std::string& name) const;
  bool hasMorphism(const std::string& name) const;

  const std::map<std::string, FinObject>& objects() const { return objects_; }
  const std::map<std::string, SubKernel>& kernels() const { return kernels_; }
  const std::map<std::string, SubKernel>& states() const { return states_; }
  const std::map<std::string, DiagramDecl>& diagrams() const { return diagrams_; }

 private:
  std::map<std::string, FinObject> objects_;
  std::map<std::string, SubKernel> kernels_;
  std::map<std::string, SubKernel> states_;
  std::map<std::string, DiagramDecl> diagrams_;
};

struct Diagnostic {
  int line = 0;
  int column = 0;
  std::string message;
};

class ParseError : public Error {
 public:
  explicit ParseError(std::vector<Diagnostic> diagnostics);
  const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

 private:
  std::vector<Diagnostic> diagnostics_;
};

class TypeError : public Error {
 public:
  TypeError(SourcePos pos, const std::string& message) : Error(message), pos_(pos) {}
  SourcePos pos() const { return pos_; }

 private:
  SourcePos pos_;
};

/// Parses a model file. Throws ParseError carrying every diagnostic found.
Model parse(std::string_view text);
/// Parses a single term against the objects of `model`.
TermPtr parseTerm(std::string_view text, const Model& model);

/// Boundary objects of `t`. Throws TypeError on mismatched boundaries,
/// unknown generators and foreign observation labels.
Signature typecheck(const TermPtr& t, const Model& model);

/// Structural interpretation: seq -> compose, par -> tensor, primitives to
/// the structural kernels, generators by lookup.
SubKernel evaluate(const TermPtr& t, const Model& model);
/// Looks up a kernel, state or diagram by name and evaluates it.
SubKernel evaluateName(const std::string& name, const Model& model);

}  // namespace pmc
