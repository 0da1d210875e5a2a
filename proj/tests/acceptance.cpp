// Acceptance gate: one PASS/FAIL line per criterion; exits non-zero if any fail.

#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "pmc/density.hpp"
#include "pmc/inference.hpp"
#include "pmc/laws.hpp"

using namespace pmc;

namespace {

using Clock = std::chrono::steady_clock;

double seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

struct Criterion {
  bool ok = true;
  std::vector<std::string> notes;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      notes.push_back(what);
    }
  }
};

int failures = 0;

void report(int id, const std::string& title, const Criterion& c, const std::string& detail) {
  std::cout << (c.ok ? "PASS" : "FAIL") << "  criterion " << id << ": " << title << "  (" << detail
            << ")\n";
  for (const auto& n : c.notes) std::cout << "        " << n << '\n';
  if (!c.ok) ++failures;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::map<std::string, LawResult> index(const std::vector<LawResult>& results) {
  std::map<std::string, LawResult> m;
  for (const auto& r : results) m[r.module + "." + r.name] = r;
  return m;
}

void requireLaw(Criterion& c, const std::map<std::string, LawResult>& laws, const std::string& name,
                std::size_t minCases, double tol) {
  auto it = laws.find(name);
  if (it == laws.end()) {
    c.require(false, name + " did not run");
    return;
  }
  const LawResult& r = it->second;
  c.require(r.passed(), name + " failed: " + r.firstFailure);
  c.require(r.cases >= minCases,
            name + " ran " + std::to_string(r.cases) + " cases, need " + std::to_string(minCases));
  c.require(r.tolerance <= tol, name + " tolerance " + fmt(r.tolerance) + " above " + fmt(tol));
}

struct Command {
  int code = -1;
  std::string out;
};

Command shell(const std::string& cmd) {
  Command result;
  FILE* pipe = popen((cmd + " 2>/dev/null").c_str(), "r");
  if (!pipe) return result;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) result.out.append(buf.data(), n);
  const int status = pclose(pipe);
  result.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

std::vector<std::vector<double>> parseCsv(const std::string& text, std::string* header) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, *header);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::stringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

int main() {
  // Criteria 1, 2, 3 and 5 share one run of the law suites.
  LawConfig cfg;
  const auto suiteStart = Clock::now();
  const std::vector<LawResult> all = runLawSuite(cfg);
  const double suiteTime = seconds(suiteStart);
  const auto laws = index(all);

  {
    Criterion c;
    const std::vector<std::string> required = {
        "kernel.copy_coassociative",
        "kernel.copy_counital",
        "kernel.copy_cocommutative",
        "kernel.comparator_commutative",
        "kernel.comparator_associative",
        "kernel.comparator_special",
        "kernel.comparator_frobenius",
        "inference.conditional_factorization",
        "inference.inversion_identity",
        "inference.normalisation_law",
        "inference.deterministic_domain_characterization",
        "inference.inversion_of_composite",
        "inference.conditional_of_composite",
        "inference.normalisation_precomposes",
        "inference.normalised_conditionals_are_conditionals",
        "inference.bayes_theorem_up_to_scalar",
        "inference.pearl_jeffrey_coincide_on_points",
    };
    for (const auto& name : required) requireLaw(c, laws, name, 200, 1e-9);
    c.require(cfg.maxSize <= 4, "object sizes above 4");
    std::size_t failed = 0;
    for (const auto& r : all) {
      if (!r.passed()) {
        ++failed;
        c.require(false, r.module + "." + r.name + " failed: " + r.firstFailure);
      }
    }
    c.require(suiteTime < 60.0, "law suites took " + fmt(suiteTime) + " s");
    report(1, "law suite green", c,
           std::to_string(required.size()) + " named laws, " + std::to_string(all.size()) +
               " laws total, " + std::to_string(failed) + " failing, " + fmt(suiteTime) + " s");
  }

  {
    Criterion c;
    requireLaw(c, laws, "maybecat.conditional_routes_agree", 200, 1e-9);
    requireLaw(c, laws, "maybecat.oplaxator_splits_laxator", 25, 1e-12);
    const auto& routes = laws.at("maybecat.conditional_routes_agree");
    const auto& split = laws.at("maybecat.oplaxator_splits_laxator");
    report(2, "conditional routes agree; oplaxator splits laxator", c,
           std::to_string(routes.cases) + " kernels, worst " + fmt(routes.worst) + "; " +
               std::to_string(split.cases) + " object pairs, worst " + fmt(split.worst));
  }

  {
    Criterion c;
    requireLaw(c, laws, "exactnf.normal_form_soundness", 500, 1e-9);
    requireLaw(c, laws, "exactnf.normal_form_normalisation", 500, 1e-9);
    c.require(cfg.nfDepth <= 6, "term depth above 6");
    const auto& sound = laws.at("exactnf.normal_form_soundness");
    const auto& norm = laws.at("exactnf.normal_form_normalisation");
    report(3, "normal-form soundness", c,
           std::to_string(sound.cases) + " terms, worst " + fmt(sound.worst) +
               "; normalisation worst " + fmt(norm.worst));
  }

  {
    Criterion c;
    using namespace pmc::density;
    const auto start = Clock::now();
    const DensityState prior = DensityState::uniform(0.0, 1.0);
    const DensityChannel channel = DensityChannel::normalMean(1.0);
    const QuadratureSpec q{2001, 1e-8};
    const std::vector<double> vs = {-1.1, 0.21, 0.78, 2.4, 2.1};
    double worstSup = 0.0;
    double worstMass = 0.0;
    for (double v : vs) {
      const DensityState post = posteriorExact(prior, channel, v, q);
      const auto oracle = truncatedNormalOracle(0.0, 1.0, 1.0, v);
      double sup = 0.0;
      for (std::size_t i = 0; i < post.xs().size(); ++i) {
        sup = std::max(sup, std::abs(post.values()[i] - oracle(post.xs()[i])));
      }
      const double mass = simpson(post.values(), post.xs()[1] - post.xs()[0]);
      worstSup = std::max(worstSup, sup);
      worstMass = std::max(worstMass, std::abs(mass - 1.0));
      c.require(sup <= 1e-6, "v=" + fmt(v) + " sup-norm " + fmt(sup));
      c.require(std::abs(mass - 1.0) <= 1e-7, "v=" + fmt(v) + " mass " + fmt(mass));
    }
    const double evidence = evidenceDensity(prior, channel, 2.1, q);
    const double closedForm = normalCdf(2.1) - normalCdf(1.1);
    c.require(std::abs(evidence - closedForm) <= 1e-8, "evidence off by " + fmt(evidence - closedForm));

    std::ostringstream csv;
    writePosteriorCSV(csv, prior, channel, {-1.1, 0.21, 0.78, 2.4}, q);
    std::string header;
    const auto rows = parseCsv(csv.str(), &header);
    c.require(header == "m,pdf_v-1.1,pdf_v0.21,pdf_v0.78,pdf_v2.4", "CSV header " + header);
    const std::vector<double> figureVs = {-1.1, 0.21, 0.78, 2.4};
    for (std::size_t k = 0; k < figureVs.size(); ++k) {
      std::size_t best = 0;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i][k + 1] > rows[best][k + 1]) best = i;
      }
      const bool atBoundary = best == 0 || best + 1 == rows.size();
      const bool expectBoundary = std::abs(figureVs[k] - 0.5) > 0.5;
      c.require(atBoundary == expectBoundary,
                "v=" + fmt(figureVs[k]) + " mode at m=" + fmt(rows[best][0]));
    }
    const double elapsed = seconds(start);
    c.require(elapsed < 5.0, "took " + fmt(elapsed) + " s");
    report(4, "posterior density reproduction", c,
           "sup-norm " + fmt(worstSup) + ", mass error " + fmt(worstMass) + ", evidence error " +
               fmt(std::abs(evidence - closedForm)) + ", " + fmt(elapsed) + " s");
  }

  {
    Criterion c;
    requireLaw(c, laws, "inference.pearl_jeffrey_coincide_on_points", 200, 1e-9);
    requireLaw(c, laws, "inference.pearl_increases_validity", 200, 1e-9);
    // The coin fixture, both readings.
    const FinObject coin = FinObject::atomic("Coin", {"H", "T"});
    const FinObject bit = FinObject::atomic("Bit", {"0", "1"});
    const SubKernel p(FinObject::unit(), coin, {0.5, 0.5});
    const SubKernel f(coin, bit, {0.9, 0.1, 0.2, 0.8});
    double worst = 0.0;
    for (std::size_t y = 0; y < 2; ++y) {
      worst = std::max(worst, maxAbsDiff(pearlUpdate(p, f, observe(bit, y), true),
                                         jeffreyUpdate(p, f, point(bit, y))));
    }
    c.require(worst <= 1e-9, "coin fixture differs by " + fmt(worst));
    const auto& coincide = laws.at("inference.pearl_jeffrey_coincide_on_points");
    const auto& valid = laws.at("inference.pearl_increases_validity");
    report(5, "Pearl and Jeffrey updates", c,
           std::to_string(coincide.cases) + " fixtures, worst " + fmt(std::max(worst, coincide.worst)) +
               "; " + std::to_string(valid.cases) + " validity cases, worst drop " + fmt(valid.worst));
  }

  {
    Criterion c;
    const std::string pmc = PMC_BINARY;
    const std::filesystem::path models = PMC_MODELS_DIR;

    const Command invert =
        shell(pmc + " invert " + (models / "coin.pmc").string() + " --kernel f --prior p");
    c.require(invert.code == 0, "invert exited " + std::to_string(invert.code));
    c.require(invert.out.find("0.81818") != std::string::npos, "invert output lacks 0.81818");

    const Command posterior =
        shell(pmc + " posterior --prior uniform:0,1 --channel normal:1 --observe 2.1 --grid 2001");
    c.require(posterior.code == 0, "posterior exited " + std::to_string(posterior.code));
    double atOne = NAN;
    if (posterior.code == 0) {
      std::string header;
      const auto rows = parseCsv(posterior.out, &header);
      for (const auto& row : rows) {
        if (row[0] == 1.0) atOne = row[1];
      }
    }
    c.require(std::abs(atOne - 1.8493) < 5e-5, "pdf at m=1 is " + fmt(atOne));

    std::size_t shipped = 0;
    for (const auto& entry : std::filesystem::directory_iterator(models)) {
      if (entry.path().extension() != ".pmc") continue;
      ++shipped;
      const Command laws = shell(pmc + " check-laws " + entry.path().string());
      c.require(laws.code == 0, "check-laws " + entry.path().filename().string() + " exited " +
                                    std::to_string(laws.code));
    }
    c.require(std::filesystem::exists(models / "empty.pmc"), "models/empty.pmc missing");
    c.require(shipped > 0, "no shipped models");
    report(6, "command-line examples", c,
           "invert, posterior pdf(1)=" + fmt(atOne) + ", check-laws on " + std::to_string(shipped) +
               " shipped models");
  }

  std::cout << (failures == 0 ? "all acceptance criteria met" : std::to_string(failures) + " criteria failed")
            << '\n';
  return failures == 0 ? 0 : 1;
}
