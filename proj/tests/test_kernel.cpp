#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "fixtures.hpp"
#include "pmc/kernel.hpp"

using namespace pmc;
using fixtures::bit;
using fixtures::coin;

namespace {

const FinObject ab = FinObject::atomic("AB", {"x", "y"});

}  // namespace

TEST_CASE("objects enumerate labels row-major") {
  const FinObject cb = tensor(coin(), bit());
  CHECK(cb.size() == 4);
  CHECK(cb.factorCount() == 2);
  CHECK(cb.name() == "Coin*Bit");
  CHECK(cb.labelString(1) == "(H,1)");
  CHECK(cb.labelString(2) == "(T,0)");
  CHECK(cb.findString("(T,1)") == 3);
  CHECK(coin().labelString(0) == "H");
  CHECK(FinObject::unit().labelString(0) == "()");
  CHECK(FinObject::unit().size() == 1);
  CHECK(tensor(FinObject::unit(), coin()) == coin());
  CHECK_THROWS_AS(cb.indexOf({"H"}), ValidationError);

  auto [left, right] = tensor(cb, coin()).split(1);
  CHECK(left == coin());
  CHECK(right == tensor(bit(), coin()));
}

TEST_CASE("atoms reject empty and duplicate label sets") {
  CHECK_THROWS_AS(FinObject::atomic("E", {}), ValidationError);
  CHECK_THROWS_AS(FinObject::atomic("D", {"a", "a"}), ValidationError);
}

TEST_CASE("validation clamps tiny negatives and rejects real violations") {
  const SubKernel k(FinObject::unit(), ab, {-1e-13, 1.0 + 5e-13});
  CHECK(k(0, 0) == 0.0);
  CHECK(k.rowSum(0) == 1.0);
  CHECK_THROWS_AS(SubKernel(FinObject::unit(), ab, {0.7, 0.6}), ValidationError);
  CHECK_THROWS_AS(SubKernel(FinObject::unit(), ab, {-0.1, 0.5}), ValidationError);
  CHECK_THROWS_AS(SubKernel(FinObject::unit(), ab, {0.5}), ValidationError);
  CHECK_THROWS_AS(SubKernel(FinObject::unit(), ab, {NAN, 0.5}), ValidationError);
}

TEST_CASE("composition sums over the internal wire") {
  const SubKernel pf = compose(fixtures::prior(), fixtures::sensor());
  CHECK(pf(0, 0) == doctest::Approx(0.55));
  CHECK(pf(0, 1) == doctest::Approx(0.45));
  CHECK(maxAbsDiff(compose(fixtures::sensor(), identity(bit())), fixtures::sensor()) == 0.0);
  CHECK_THROWS_AS(compose(fixtures::sensor(), fixtures::prior()), CompositionError);

  const FinObject three = FinObject::atomic("Three", {"a", "b", "c"});
  const SubKernel d1 = deterministic(coin(), bit(), [](std::size_t i) { return 1 - i; });
  const SubKernel d2 = deterministic(bit(), three, [](std::size_t i) { return 2 * i; });
  const SubKernel d12 = deterministic(coin(), three, [](std::size_t i) { return 2 * (1 - i); });
  CHECK(maxAbsDiff(compose(d1, d2), d12) == 0.0);
}

TEST_CASE("tensor multiplies weights and failures") {
  const FinObject xs = FinObject::atomic("X", {"x"});
  const FinObject ys = FinObject::atomic("Y", {"y"});
  const SubKernel half1(FinObject::unit(), xs, {0.5});
  const SubKernel half2(FinObject::unit(), ys, {0.5});
  const SubKernel t = tensor(half1, half2);
  CHECK(t(0, 0) == doctest::Approx(0.25));
  CHECK(t.failure(0) == doctest::Approx(0.75));
  CHECK(maxAbsDiff(tensor(identity(coin()), identity(bit())), identity(tensor(coin(), bit()))) == 0.0);
  CHECK(isTotal(tensor(fixtures::sensor(), compose(discard(coin()), fixtures::prior()))));
}

TEST_CASE("structural morphisms") {
  const SubKernel c = copy(bit());
  CHECK(c(0, 0) == 1.0);
  CHECK(c(0, 1) == 0.0);
  CHECK(c(1, 3) == 1.0);
  CHECK(maxAbsDiff(compose(c, tensor(discard(bit()), identity(bit()))), identity(bit())) == 0.0);

  const SubKernel s = swap(coin(), bit());
  CHECK(maxAbsDiff(compose(s, swap(bit(), coin())), identity(tensor(coin(), bit()))) == 0.0);
  CHECK(maxAbsDiff(swap(FinObject::unit(), coin()), identity(coin())) == 0.0);
  // (f * g) ; swap = swap ; (g * f)
  const SubKernel f = fixtures::sensor();
  const SubKernel g(bit(), coin(), {0.3, 0.6, 1.0, 0.0});
  CHECK(maxAbsDiff(compose(tensor(f, g), swap(bit(), coin())),
                   compose(swap(coin(), bit()), tensor(g, f))) < 1e-15);

  const SubKernel m = compare(bit());
  CHECK(m(0, 0) == 1.0);
  CHECK(m.failure(1) == 1.0);
  CHECK(maxAbsDiff(compose(copy(bit()), m), identity(bit())) == 0.0);

  const SubKernel o = observe(coin(), Label{"H"});
  CHECK(o(0, 0) == 1.0);
  CHECK(o(1, 0) == 0.0);
  CHECK(compose(point(coin(), Label{"H"}), o).scalar() == 1.0);
  const FinObject one = FinObject::atomic("One", {"*"});
  CHECK(maxAbsDiff(observe(one, 0), discard(one)) == 0.0);
  // (x * id) ; compare ; discard
  const SubKernel viaCompare =
      compose(tensor(point(coin(), 0), identity(coin())), compare(coin()), discard(coin()));
  CHECK(maxAbsDiff(viaCompare, o) == 0.0);
}

TEST_CASE("totality and determinism") {
  for (const auto& k : {copy(coin()), discard(coin()), swap(coin(), bit()), identity(bit())}) {
    CHECK(isTotal(k));
    CHECK(isDeterministic(k));
  }
  CHECK(isDeterministic(compare(bit())));
  CHECK_FALSE(isTotal(compare(bit())));
  CHECK(isTotal(fixtures::sensor()));
  CHECK_FALSE(isDeterministic(fixtures::sensor()));
  CHECK(hasDeterministicDomain(compare(bit())));
  CHECK(hasDeterministicDomain(fixtures::sensor()));
  CHECK_FALSE(hasDeterministicDomain(SubKernel(FinObject::unit(), ab, {0.3, 0.3})));
}

TEST_CASE("domain of definition and marginals") {
  const SubKernel f(FinObject::unit(), ab, {0.3, 0.3});
  CHECK(domainOfDefinition(f).scalar() == doctest::Approx(0.6));

  const SubKernel joint(FinObject::unit(), tensor(bit(), bit()), {0.2, 0.2, 0.6, 0.0});
  const SubKernel m1 = project(joint, 1, Side::first);
  CHECK(m1(0, 0) == doctest::Approx(0.4));
  CHECK(m1(0, 1) == doctest::Approx(0.6));
  const SubKernel m2 = project(joint, 1, Side::second);
  CHECK(m2(0, 0) == doctest::Approx(0.8));

  const SubKernel dirac = point(tensor(coin(), bit()), Label{"T", "1"});
  CHECK(maxAbsDiff(project(dirac, 1, Side::first), point(coin(), Label{"T"})) == 0.0);
  CHECK(maxAbsDiff(project(dirac, 1, Side::second), point(bit(), Label{"1"})) == 0.0);
}

TEST_CASE("graph") {
  CHECK(maxAbsDiff(graph(identity(coin())), copy(coin())) == 0.0);
  const SubKernel gf = graph(fixtures::sensor());
  CHECK(gf(0, 0) == doctest::Approx(0.9));
  CHECK(gf(0, 1) == doctest::Approx(0.1));
  CHECK(gf(0, 2) == 0.0);
  CHECK(maxAbsDiff(project(gf, 1, Side::second), fixtures::sensor()) == 0.0);
}

TEST_CASE("conditional composition") {
  // A state has domain I, so I*Coin = Coin and the sensor itself fits.
  const SubKernel joint = condComp(fixtures::prior(), fixtures::sensor());
  const double expected[] = {0.45, 0.05, 0.1, 0.4};
  for (std::size_t i = 0; i < 4; ++i) CHECK(joint(0, i) == doctest::Approx(expected[i]));

  const SubKernel f = fixtures::sensor();
  CHECK(maxAbsDiff(condComp(f, discard(tensor(coin(), bit()))), f) == 0.0);

  // A = I: scalar reweighting.
  const SubKernel s(coin(), FinObject::unit(), {0.5, 0.25});
  const SubKernel weighted = condComp(s, f);
  CHECK(weighted(0, 0) == doctest::Approx(0.45));
  CHECK(weighted(1, 1) == doctest::Approx(0.2));
}

TEST_CASE("almost-sure equality") {
  const SubKernel f = fixtures::sensor();
  const SubKernel g1(tensor(bit(), coin()), coin(), {1, 0, 0, 1, 0.5, 0.5, 0.2, 0.8});
  CHECK(asEqual(f, g1, g1, 1e-12));

  // f = Dirac(0): rows with first input 1 are never reached.
  const SubKernel dirac = deterministic(coin(), bit(), [](std::size_t) { return 0; });
  const SubKernel g2(tensor(bit(), coin()), coin(), {1, 0, 0, 1, 0, 1, 1, 0});
  CHECK(asEqual(dirac, g1, g2, 1e-12));

  const SubKernel half(FinObject::unit(), FinObject::atomic("A", {"a"}), {0.5});
  const FinObject dom = tensor(half.cod(), FinObject::unit());
  CHECK_FALSE(asEqual(half, SubKernel(dom, bit(), {1, 0}), SubKernel(dom, bit(), {0, 1}), 1e-12));
  CHECK_THROWS_AS(asEqual(f, f, f, 1e-12), CompositionError);
}

TEST_CASE("tolerances validate") {
  CHECK_NOTHROW(Tolerances{}.validate());
  CHECK_THROWS_AS((Tolerances{1e-9, 1e-12, 1e-6}.validate()), ValidationError);
  CHECK_THROWS_AS((Tolerances{0.0, 1e-12, 1e-12}.validate()), ValidationError);
}
