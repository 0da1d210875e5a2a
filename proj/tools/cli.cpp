#include "cli.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

#include "pmc/density.hpp"
#include "pmc/diagram.hpp"
#include "pmc/exactnf.hpp"
#include "pmc/inference.hpp"
#include "pmc/laws.hpp"

namespace pmc::cli {

using nlohmann::json;

json objectToJson(const FinObject& x) {
  json factors = json::array();
  for (const auto& atom : x.atoms()) factors.push_back({{"name", atom->name}, {"labels", atom->labels}});
  return {{"name", x.name()}, {"factors", factors}};
}

FinObject objectFromJson(const json& j) {
  FinObject x = FinObject::unit();
  for (const auto& f : j.at("factors")) {
    x = tensor(x, FinObject::atomic(f.at("name").get<std::string>(),
                                    f.at("labels").get<std::vector<std::string>>()));
  }
  return x;
}

json kernelToJson(const SubKernel& k) {
  json rows = json::object();
  json fail = json::object();
  for (std::size_t i = 0; i < k.rows(); ++i) {
    json row = json::object();
    for (std::size_t o = 0; o < k.cols(); ++o) {
      if (k(i, o) != 0.0) row[k.cod().labelString(o)] = k(i, o);
    }
    rows[k.dom().labelString(i)] = row;
    fail[k.dom().labelString(i)] = k.failure(i);
  }
  return {{"dom", objectToJson(k.dom())}, {"cod", objectToJson(k.cod())}, {"rows", rows}, {"fail", fail}};
}

SubKernel kernelFromJson(const json& j, double slack) {
  const FinObject dom = objectFromJson(j.at("dom"));
  const FinObject cod = objectFromJson(j.at("cod"));
  std::vector<double> w(dom.size() * cod.size(), 0.0);
  for (const auto& [in, row] : j.at("rows").items()) {
    const auto i = dom.findString(in);
    if (!i) throw ValidationError("unknown input label '" + in + "' for " + dom.name());
    for (const auto& [out, weight] : row.items()) {
      const auto o = cod.findString(out);
      if (!o) throw ValidationError("unknown output label '" + out + "' for " + cod.name());
      w[*i * cod.size() + *o] = weight.get<double>();
    }
  }
  return SubKernel(dom, cod, std::move(w), slack);
}

namespace {

struct UsageError : Error {
  using Error::Error;
};

enum class Format { table, json, csv };

struct Config {
  Format format = Format::table;
  Tolerances tol{};
  ConditioningConvention convention = ConditioningConvention::uniform_fill;

  InferenceOptions options() const { return {convention, tol}; }
};

std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string csvField(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

void printTable(std::ostream& out, const std::string& title, const SubKernel& k) {
  out << title << ": " << k.dom().name() << " -> " << k.cod().name() << '\n';
  std::vector<std::vector<std::string>> cells;
  std::vector<std::string> header{""};
  for (std::size_t o = 0; o < k.cols(); ++o) header.push_back(k.cod().labelString(o));
  header.push_back("fail");
  cells.push_back(header);
  for (std::size_t i = 0; i < k.rows(); ++i) {
    std::vector<std::string> row{k.dom().labelString(i)};
    for (std::size_t o = 0; o < k.cols(); ++o) row.push_back(number(k(i, o)));
    row.push_back(number(k.failure(i)));
    cells.push_back(row);
  }
  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& row : cells) {
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  for (const auto& row : cells) {
    std::string line;
    for (std::size_t c = 0; c < row.size(); ++c) {
      line += row[c];
      if (c + 1 < row.size()) line += std::string(width[c] - row[c].size() + 2, ' ');
    }
    out << line << '\n';
  }
}

void printCsv(std::ostream& out, const SubKernel& k) {
  out << "input";
  for (std::size_t o = 0; o < k.cols(); ++o) out << ',' << csvField(k.cod().labelString(o));
  out << ",fail\n";
  char buf[32];
  for (std::size_t i = 0; i < k.rows(); ++i) {
    out << csvField(k.dom().labelString(i));
    for (std::size_t o = 0; o < k.cols(); ++o) {
      std::snprintf(buf, sizeof buf, "%.17g", k(i, o));
      out << ',' << buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g", k.failure(i));
    out << ',' << buf << '\n';
  }
}

void emitKernel(std::ostream& out, const Config& cfg, const std::string& title, const SubKernel& k,
                const json& extra = json::object()) {
  switch (cfg.format) {
    case Format::json: {
      json j = kernelToJson(k);
      j["name"] = title;
      for (const auto& [key, value] : extra.items()) j[key] = value;
      out << j.dump() << '\n';
      break;
    }
    case Format::csv: printCsv(out, k); break;
    case Format::table:
      printTable(out, title, k);
      for (const auto& [key, value] : extra.items()) {
        out << key << ": " << (value.is_number() ? number(value.get<double>()) : value.dump()) << '\n';
      }
      break;
  }
}

Model loadModel(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read model file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse(text.str());
}

/// A declared kernel, state or diagram by name, or else an inline term.
SubKernel resolve(const Model& model, const std::string& name) {
  if (model.hasMorphism(name)) return evaluateName(name, model);
  return evaluate(parseTerm(name, model), model);
}

TermPtr resolveTerm(const Model& model, const std::string& name) {
  if (auto it = model.diagrams().find(name); it != model.diagrams().end()) return it->second.term;
  if (model.hasMorphism(name)) return term::gen(name);
  return parseTerm(name, model);
}

std::pair<std::string, std::vector<double>> parseSpec(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw UsageError("expected KIND:PARAMS, got '" + text + "'");
  std::vector<double> params;
  std::stringstream rest(text.substr(colon + 1));
  std::string item;
  while (std::getline(rest, item, ',')) {
    try {
      std::size_t used = 0;
      params.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("bad number '" + item + "' in '" + text + "'");
    }
  }
  return {text.substr(0, colon), params};
}

density::DensityState parsePrior(const std::string& text) {
  auto [kind, p] = parseSpec(text);
  try {
    if (kind == "uniform" && p.size() == 2) return density::DensityState::uniform(p[0], p[1]);
    if (kind == "normal" && p.size() == 2) return density::DensityState::normal(p[0], p[1]);
  } catch (const ValidationError& e) {
    throw UsageError(std::string("--prior: ") + e.what());
  }
  throw UsageError("prior must be uniform:A,B or normal:MU,SIGMA");
}

density::DensityChannel parseChannel(const std::string& text) {
  auto [kind, p] = parseSpec(text);
  try {
    if (kind == "normal" && p.size() == 1) return density::DensityChannel::normalMean(p[0]);
  } catch (const ValidationError& e) {
    throw UsageError(std::string("--channel: ") + e.what());
  }
  throw UsageError("channel must be normal:SIGMA");
}

void emitNormalForm(std::ostream& out, const Config& cfg, const std::string& title,
                    const NormalForm& nf) {
  const std::vector<double> success = successMass(nf);
  if (cfg.format == Format::json) {
    json s = json::object();
    for (std::size_t i = 0; i < success.size(); ++i) s[nf.dom().labelString(i)] = success[i];
    json j{{"name", title},
           {"h", kernelToJson(nf.h.kernel())},
           {"z", nf.evidence().labelString(nf.z)},
           {"g", kernelToJson(nf.g.kernel())},
           {"success", s}};
    out << j.dump() << '\n';
    return;
  }
  if (cfg.format == Format::csv) {
    out << "input,success\n";
    for (std::size_t i = 0; i < success.size(); ++i) {
      out << csvField(nf.dom().labelString(i)) << ',' << number(success[i]) << '\n';
    }
    return;
  }
  printTable(out, "h", nf.h.kernel());
  out << "z: " << nf.evidence().labelString(nf.z) << '\n';
  printTable(out, "g", nf.g.kernel());
  out << "success:\n";
  for (std::size_t i = 0; i < success.size(); ++i) {
    out << "  " << nf.dom().labelString(i) << "  " << number(success[i]) << '\n';
  }
}

int reportLaws(std::ostream& out, const Config& cfg, const std::vector<LawResult>& results) {
  bool ok = true;
  json list = json::array();
  for (const auto& r : results) {
    ok = ok && r.passed();
    if (cfg.format == Format::json) {
      list.push_back({{"module", r.module},
                      {"law", r.name},
                      {"passed", r.passed()},
                      {"cases", r.cases},
                      {"failures", r.failures},
                      {"worst", r.worst},
                      {"tolerance", r.tolerance},
                      {"first_failure", r.firstFailure}});
    } else if (cfg.format == Format::csv) {
      if (&r == &results.front()) out << "module,law,passed,cases,failures,worst\n";
      out << r.module << ',' << r.name << ',' << (r.passed() ? "true" : "false") << ',' << r.cases
          << ',' << r.failures << ',' << number(r.worst) << '\n';
    } else {
      out << (r.passed() ? "PASS " : "FAIL ") << r.module << '.' << r.name << "  cases=" << r.cases
          << "  worst=" << number(r.worst);
      if (!r.passed() && !r.firstFailure.empty()) out << "  first: " << r.firstFailure;
      out << '\n';
    }
  }
  if (cfg.format == Format::json) out << json{{"passed", ok}, {"laws", list}}.dump() << '\n';
  return ok ? kOk : kLawFailure;
}

void reportError(std::ostream& err, const Config& cfg, const std::string& kind,
                 const std::string& message, const json& extra = json::object()) {
  if (cfg.format == Format::json) {
    json j{{"error", kind}, {"message", message}};
    for (const auto& [key, value] : extra.items()) j[key] = value;
    err << j.dump() << '\n';
  } else {
    err << "pmc: " << kind << " error: " << message << '\n';
  }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Config cfg;
  CLI::App app{"Finite partial Markov kernels: composition, conditioning, inversion and updates",
               "pmc"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string format = "table";
  std::string convention = "uniform";
  std::optional<double> lawTol;
  std::optional<double> zeroMassTol;
  app.add_option("--format", format, "Output format")
      ->check(CLI::IsMember({"table", "json", "csv"}))
      ->capture_default_str();
  app.add_option("--convention", convention, "Rows of zero mass: uniform or zero")
      ->check(CLI::IsMember({"uniform", "zero"}))
      ->capture_default_str();
  app.add_option("--law-tol", lawTol, "Tolerance for law checks");
  app.add_option("--zero-mass-tol", zeroMassTol, "Mass below which a row counts as empty");

  std::string modelPath;
  std::string termName;
  auto addModel = [&](CLI::App* sub) {
    sub->add_option("model", modelPath, "Model file")->required();
  };
  auto addTerm = [&](CLI::App* sub) {
    addModel(sub);
    sub->add_option("--term", termName, "Kernel, state or diagram name, or an inline term")
        ->required();
  };

  auto* evalCmd = app.add_subcommand("eval", "Evaluate a kernel, state or diagram");
  addTerm(evalCmd);
  auto* normalizeCmd = app.add_subcommand("normalize", "Renormalize every row");
  addTerm(normalizeCmd);
  std::size_t split = 1;
  auto* conditionCmd = app.add_subcommand("condition", "Conditional on the first K output factors");
  addTerm(conditionCmd);
  conditionCmd->add_option("--split", split, "Number of output factors conditioned on")->required();

  std::string kernelName;
  std::string priorName;
  std::string channelName;
  std::string predicateName;
  std::string evidenceName;
  bool renorm = false;
  auto* invertCmd = app.add_subcommand("invert", "Bayesian inversion of a kernel against a prior");
  addModel(invertCmd);
  invertCmd->add_option("--kernel", kernelName, "Channel to invert")->required();
  invertCmd->add_option("--prior", priorName, "Prior state")->required();

  auto* pearlCmd = app.add_subcommand("pearl", "Update a prior on a predicate seen through a channel");
  addModel(pearlCmd);
  pearlCmd->add_option("--prior", priorName, "Prior state")->required();
  pearlCmd->add_option("--channel", channelName, "Channel")->required();
  pearlCmd->add_option("--predicate", predicateName, "Predicate on the channel's output")->required();
  pearlCmd->add_flag("--renorm", renorm, "Renormalize the updated state");

  auto* jeffreyCmd = app.add_subcommand("jeffrey", "Update a prior towards an evidence distribution");
  addModel(jeffreyCmd);
  jeffreyCmd->add_option("--prior", priorName, "Prior state")->required();
  jeffreyCmd->add_option("--channel", channelName, "Channel")->required();
  jeffreyCmd->add_option("--evidence", evidenceName, "Evidence state on the channel's output")
      ->required();

  auto* nfCmd = app.add_subcommand("nf", "Normal form of a term with exact observations");
  addTerm(nfCmd);

  std::string priorSpec;
  std::string channelSpec;
  std::vector<double> observations;
  int grid = 2001;
  std::string outPath;
  auto* posteriorCmd = app.add_subcommand("posterior", "Posterior densities on a grid, as CSV");
  posteriorCmd->add_option("--prior", priorSpec, "uniform:A,B or normal:MU,SIGMA")->required();
  posteriorCmd->add_option("--channel", channelSpec, "normal:SIGMA")->required();
  posteriorCmd->add_option("--observe", observations, "Observed value (repeatable)")
      ->allow_extra_args(false);
  posteriorCmd->add_option("--grid", grid, "Odd number of grid points")->capture_default_str();
  posteriorCmd->add_option("--out", outPath, "CSV path (default: standard output)");

  std::uint64_t seed = LawConfig{}.seed;
  std::optional<double> checkTol;
  auto* lawsCmd = app.add_subcommand("check-laws", "Run the law suites against a model");
  addModel(lawsCmd);
  lawsCmd->add_option("--seed", seed, "Seed for the randomized cases")->capture_default_str();
  lawsCmd->add_option("--tol", checkTol, "Law tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    if (format == "json") cfg.format = Format::json;
    reportError(err, cfg, "usage", e.what());
    return kUsage;
  }

  cfg.format = format == "json" ? Format::json : format == "csv" ? Format::csv : Format::table;
  cfg.convention = convention == "zero" ? ConditioningConvention::zero_fill
                                        : ConditioningConvention::uniform_fill;

  try {
    if (lawTol) cfg.tol.law_tol = *lawTol;
    if (checkTol) cfg.tol.law_tol = *checkTol;
    if (zeroMassTol) cfg.tol.zero_mass_tol = *zeroMassTol;
    cfg.tol.validate();
    const InferenceOptions opts = cfg.options();

    if (*posteriorCmd) {
      const auto prior = parsePrior(priorSpec);
      const auto channel = parseChannel(channelSpec);
      const density::QuadratureSpec q{grid, density::QuadratureSpec{}.quad_tol};
      try {
        q.validate();
      } catch (const ValidationError& e) {
        throw UsageError(std::string("--grid: ") + e.what());
      }
      if (outPath.empty()) {
        density::writePosteriorCSV(out, prior, channel, observations, q);
      } else {
        density::emitPosteriorCSV(prior, channel, observations, q, outPath);
      }
      return kOk;
    }

    const Model model = loadModel(modelPath);
    if (*evalCmd) {
      emitKernel(out, cfg, termName, resolve(model, termName));
    } else if (*normalizeCmd) {
      emitKernel(out, cfg, "normalize(" + termName + ")", normalize(resolve(model, termName), opts));
    } else if (*conditionCmd) {
      emitKernel(out, cfg, "conditional(" + termName + ")",
                 conditional(resolve(model, termName), split, opts));
    } else if (*invertCmd) {
      emitKernel(out, cfg, kernelName + "^dagger(" + priorName + ")",
                 bayesInvert(resolve(model, kernelName), resolve(model, priorName), opts));
    } else if (*pearlCmd) {
      const SubKernel p = resolve(model, priorName);
      const SubKernel f = resolve(model, channelName);
      const SubKernel q = resolve(model, predicateName);
      const SubKernel updated = pearlUpdate(p, f, q, renorm, opts);
      json extra{{"validity_prior", validity(p, f, q)}};
      if (renorm) extra["validity_updated"] = validity(updated, f, q);
      emitKernel(out, cfg, "pearl(" + priorName + ")", updated, extra);
    } else if (*jeffreyCmd) {
      emitKernel(out, cfg, "jeffrey(" + priorName + ")",
                 jeffreyUpdate(resolve(model, priorName), resolve(model, channelName),
                               resolve(model, evidenceName), opts));
    } else if (*nfCmd) {
      emitNormalForm(out, cfg, termName, nfFromTerm(resolveTerm(model, termName), model, cfg.tol));
    } else if (*lawsCmd) {
      LawConfig lc;
      lc.seed = seed;
      lc.options = opts;
      return reportLaws(out, cfg, runLawSuite(lc, &model));
    }
    return kOk;
  } catch (const UsageError& e) {
    reportError(err, cfg, "usage", e.what());
    return kUsage;
  } catch (const ParseError& e) {
    json diags = json::array();
    for (const auto& d : e.diagnostics()) {
      diags.push_back({{"line", d.line}, {"column", d.column}, {"message", d.message}});
    }
    std::string message = e.what();
    if (cfg.format == Format::json) message = "model file has " + std::to_string(diags.size()) + " error(s)";
    reportError(err, cfg, "parse", message, {{"diagnostics", diags}});
    return kModel;
  } catch (const TypeError& e) {
    reportError(err, cfg, "type",
                std::to_string(e.pos().line) + ":" + std::to_string(e.pos().column) + ": " + e.what());
    return kModel;
  } catch (const NumericError& e) {
    reportError(err, cfg, "numeric", e.what());
    return kNumeric;
  } catch (const Error& e) {
    reportError(err, cfg, "model", e.what());
    return kModel;
  }
}

}  // namespace pmc::cli
