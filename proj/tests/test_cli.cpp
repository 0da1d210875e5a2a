#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "fixtures.hpp"
#include "pmc/random.hpp"

using namespace pmc;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result pmcRun(std::vector<std::string> args) {
  args.insert(args.begin(), "pmc");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class TempModel {
 public:
  explicit TempModel(const std::string& text, const std::string& name = "pmc_cli_test.pmc")
      : path_(std::filesystem::temp_directory_path() / name) {
    std::ofstream(path_) << text;
  }
  ~TempModel() { std::filesystem::remove(path_); }
  std::string path() const { return path_.string(); }

 private:
  std::filesystem::path path_;
};

const std::string kModel = std::string(fixtures::kCoinModel) + R"(
state t : Bit = { 0 : 0.5, 1 : 0.5 }
diagram saw0 : Bit -> I = observe[Bit = 0]
kernel lossy : Coin -> Bit = { H -> { 0 : 0.3, 1 : 0.3 }, T -> { 1 : 1 } }
)";

}  // namespace

TEST_CASE("kernels round-trip through JSON") {
  Rng rng(5);
  for (int i = 0; i < 30; ++i) {
    const FinObject x = tensor(randomAtom(rng, 3, "X"), randomAtom(rng, 3, "W"));
    const FinObject y = rng.chance(0.2) ? FinObject::unit() : randomAtom(rng, 4, "Y");
    const SubKernel k = randomKernel(rng, x, y, KernelShape::substochastic);
    const json j = json::parse(cli::kernelToJson(k).dump());
    CHECK(maxAbsDiff(cli::kernelFromJson(j), k) <= kDefaultSlack);
  }
  const json bad = {{"dom", cli::objectToJson(fixtures::coin())},
                    {"cod", cli::objectToJson(fixtures::bit())},
                    {"rows", {{"Q", {{"0", 1.0}}}}}};
  CHECK_THROWS_AS(cli::kernelFromJson(bad), ValidationError);
}

TEST_CASE("invert prints the posterior of the sensor") {
  TempModel m(kModel);
  const Result r = pmcRun({"invert", m.path(), "--kernel", "f", "--prior", "p"});
  CHECK(r.code == 0);
  CHECK(r.out.find("0.818181818182") != std::string::npos);

  const Result j = pmcRun({"invert", m.path(), "--kernel", "f", "--prior", "p", "--format", "json"});
  REQUIRE(j.code == 0);
  const json parsed = json::parse(j.out);
  CHECK(parsed["rows"]["0"]["H"].get<double>() == doctest::Approx(9.0 / 11));
  CHECK(parsed["fail"]["1"].get<double>() == doctest::Approx(0.0));
}

TEST_CASE("eval, normalize and condition") {
  TempModel m(kModel);
  const Result e = pmcRun({"--format", "json", "eval", m.path(), "--term", "p ; f"});
  REQUIRE(e.code == 0);
  CHECK(json::parse(e.out)["rows"]["()"]["0"].get<double>() == doctest::Approx(0.55));

  const Result n = pmcRun({"normalize", m.path(), "--term", "lossy", "--format", "json"});
  REQUIRE(n.code == 0);
  CHECK(json::parse(n.out)["rows"]["H"]["0"].get<double>() == doctest::Approx(0.5));

  const Result c = pmcRun({"condition", m.path(), "--term", "p ; copy[Coin] ; id[Coin] * f",
                           "--split", "1", "--format", "csv"});
  REQUIRE(c.code == 0);
  CHECK(c.out.rfind("input,0,1,fail\n", 0) == 0);
  CHECK(c.out.find("H,0.9") != std::string::npos);
}

TEST_CASE("pearl and jeffrey") {
  TempModel m(kModel);
  const Result p = pmcRun({"pearl", m.path(), "--prior", "p", "--channel", "f", "--predicate",
                           "saw0", "--renorm", "--format", "json"});
  REQUIRE(p.code == 0);
  const json pj = json::parse(p.out);
  CHECK(pj["rows"]["()"]["H"].get<double>() == doctest::Approx(9.0 / 11));
  CHECK(pj["validity_prior"].get<double>() == doctest::Approx(0.55));
  CHECK(pj["validity_updated"].get<double>() == doctest::Approx(0.7727272727272727));

  const Result raw = pmcRun({"pearl", m.path(), "--prior", "p", "--channel", "f", "--predicate",
                             "saw0", "--format", "json"});
  CHECK(json::parse(raw.out)["rows"]["()"]["T"].get<double>() == doctest::Approx(0.1));

  const Result j = pmcRun({"jeffrey", m.path(), "--prior", "p", "--channel", "f", "--evidence",
                           "t", "--format", "json"});
  REQUIRE(j.code == 0);
  CHECK(json::parse(j.out)["rows"]["()"]["H"].get<double>() ==
        doctest::Approx(0.46464646464646464));
}

TEST_CASE("normal form output") {
  TempModel m(kModel);
  const Result r = pmcRun({"nf", m.path(), "--term", "p ; copy[Coin] ; id[Coin] * (f ; saw0)",
                           "--format", "json"});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["success"]["()"].get<double>() == doctest::Approx(0.55));
  CHECK(j["g"]["rows"]["()"]["H"].get<double>() == doctest::Approx(9.0 / 11));
  CHECK(j.contains("h"));
  CHECK(j.contains("z"));

  const Result lossy = pmcRun({"nf", m.path(), "--term", "lossy"});
  CHECK(lossy.code == cli::kModel);
}

TEST_CASE("posterior CSV on standard output and to a file") {
  const Result r = pmcRun({"posterior", "--prior", "uniform:0,1", "--channel", "normal:1",
                           "--observe", "2.1", "--grid", "2001"});
  REQUIRE(r.code == 0);
  std::istringstream lines(r.out);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "m,pdf_v2.1");
  double last = 0.0;
  while (std::getline(lines, line)) last = std::stod(line.substr(line.find(',') + 1));
  CHECK(last == doctest::Approx(1.8493).epsilon(1e-4));

  const Result neg = pmcRun({"posterior", "--prior", "uniform:0,1", "--channel", "normal:1",
                             "--observe", "-1.1", "--observe", "0.21", "--grid", "11"});
  REQUIRE(neg.code == 0);
  CHECK(neg.out.rfind("m,pdf_v-1.1,pdf_v0.21\n", 0) == 0);

  const auto path = std::filesystem::temp_directory_path() / "pmc_cli_posterior.csv";
  const Result f = pmcRun({"posterior", "--prior", "uniform:0,1", "--channel", "normal:1",
                           "--grid", "11", "--out", path.string()});
  CHECK(f.code == 0);
  CHECK(f.out.empty());
  std::ifstream in(path);
  std::getline(in, line);
  CHECK(line == "m");
  std::filesystem::remove(path);
}

TEST_CASE("exit codes") {
  TempModel m(kModel);
  CHECK(pmcRun({}).code == cli::kUsage);
  CHECK(pmcRun({"frobnicate"}).code == cli::kUsage);
  CHECK(pmcRun({"eval", m.path()}).code == cli::kUsage);
  CHECK(pmcRun({"eval", "/nonexistent.pmc", "--term", "f"}).code == cli::kUsage);
  CHECK(pmcRun({"eval", m.path(), "--term", "f ; p"}).code == cli::kModel);
  CHECK(pmcRun({"eval", m.path(), "--term", "nothing"}).code == cli::kModel);
  CHECK(pmcRun({"posterior", "--prior", "beta:1,2", "--channel", "normal:1"}).code == cli::kUsage);
  CHECK(pmcRun({"posterior", "--prior", "uniform:0,1", "--channel", "normal:0.01", "--observe",
                "9"}).code == cli::kNumeric);
  CHECK(pmcRun({"posterior", "--prior", "uniform:0,1", "--channel", "normal:1", "--grid", "10"})
            .code == cli::kUsage);

  TempModel broken("object X = { a }\nkernel k : X -> X = { a -> { a : 1.3 } }\n", "pmc_broken.pmc");
  const Result b = pmcRun({"eval", broken.path(), "--term", "k", "--format", "json"});
  CHECK(b.code == cli::kModel);
  CHECK(b.err.find('\n') == b.err.size() - 1);
  const json err = json::parse(b.err);
  CHECK(err["error"] == "parse");
  CHECK(err["diagnostics"][0]["line"] == 2);
}

TEST_CASE("check-laws") {
  TempModel empty("# nothing here\n", "pmc_empty.pmc");
  const Result r = pmcRun({"check-laws", empty.path()});
  CHECK(r.code == 0);
  CHECK(r.out.find("FAIL") == std::string::npos);
  CHECK(r.out.find("PASS inference.conditional_factorization") != std::string::npos);

  TempModel m(kModel);
  const Result a = pmcRun({"check-laws", m.path(), "--seed", "7"});
  const Result b = pmcRun({"check-laws", m.path(), "--seed", "7"});
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.find("PASS model.inversion_identity") != std::string::npos);

  const Result j = pmcRun({"check-laws", m.path(), "--format", "json"});
  CHECK(json::parse(j.out)["passed"] == true);
}
