#pragma once
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace cafe {

// sorts are interned by name, process wide
using SortId = int;
SortId internSort(const std::string& name);
const std::string& sortName(SortId s);
int sortCount();
inline constexpr SortId kUniversal = 0;

enum class Builtin : uint8_t {
  None, Eq, EqEq, If, SortTest, SearchStep, SearchOne, SearchReach, NatLit
};

struct Op {
  std::string name;              // "_+_", "s_", "[_r_w_c_]", "pc"
  std::vector<SortId> arity;
  SortId coarity = kUniversal;
  bool constr = false, assoc = false, comm = false;
  const Op* id = nullptr;        // identity constant
  int prec = 0;
  bool precGiven = false;
  Builtin builtin = Builtin::None;
  SortId testSort = -1;          // `_:is S`
  long long natValue = 0;

  // filled by internOp
  int serial = 0;
  int nameId = 0;                // name + arity length, shared by overloads
  std::vector<std::string> pattern;  // tokens, "_" marks a hole
  std::vector<std::string> display;  // like pattern but name pieces kept whole, for printing
  bool standard = false;         // no holes: printed and parsed as f(a,b)

  size_t nargs() const { return arity.size(); }
  bool ac() const { return assoc && comm; }
  bool infixLike() const;        // pattern starts or ends with a hole
};

int defaultPrec(const std::string& name, size_t nargs);
const Op* internOp(const Op& proto);
std::vector<std::string> opPattern(const std::string& name);

struct Term;
using TermP = std::shared_ptr<const Term>;

struct Term {
  const Op* op = nullptr;        // null: variable
  std::string name;              // variable name
  SortId sort = kUniversal;      // declared sort of a variable, least sort of an application
  std::vector<TermP> args;       // flattened for assoc ops
  std::vector<uint32_t> order;   // comm ops: argument indices in canonical order
  uint64_t hash = 0;
  bool ground = true;
  bool isVar() const { return op == nullptr; }
};

TermP mkVar(const std::string& name, SortId s);
// no normalisation beyond canonical ordering and hashing
TermP mkRaw(const Op* op, std::vector<TermP> args, SortId sort);

int compareTerms(const Term& a, const Term& b);
inline bool sameVar(const Term& a, const Term& b) { return a.name == b.name && a.sort == b.sort; }
bool equalAC(const TermP& a, const TermP& b);
bool equalAC(const Term& a, const Term& b);

struct TermHash { size_t operator()(const TermP& t) const { return t->hash; } };
struct TermEq { bool operator()(const TermP& a, const TermP& b) const { return equalAC(a, b); } };

// pretty printer; top level infix terms are wrapped unless wrapTop is false
std::string printTerm(const TermP& t, bool wrapTop = true);
std::string fingerprint(const TermP& t);
void collectVars(const TermP& t, std::vector<TermP>& out);
size_t termSize(const TermP& t);

}  // namespace cafe
