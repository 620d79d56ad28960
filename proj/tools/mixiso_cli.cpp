// Command-line front end: zoo | analyze | profile | bounds | mixing | verify.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mixiso/mixiso.hpp"

namespace {

using namespace mixiso;

constexpr int kExitOk = 0;
constexpr int kExitViolation = 1;
constexpr int kExitInput = 2;

struct Options {
  std::string chain_file;
  std::vector<std::string> zoo;
  std::string set;
  std::string quantity;
  std::string window;
  double epsilon = 0.25;
  bool reversed = false;
  std::string out;
  std::string format = "json";
  unsigned threads = 0;
  std::size_t max_states = kDefaultMaxStates;
};

ZooChain load(const Options& o) {
  if (o.chain_file.empty() == o.zoo.empty())
    throw Error(ErrorKind::BadParam, "give exactly one of --chain FILE or --zoo FAMILY PARAMS");
  if (!o.chain_file.empty()) return {load_chain(o.chain_file), std::nullopt};
  return make_zoo(o.zoo.front(), std::vector<std::string>(o.zoo.begin() + 1, o.zoo.end()));
}

StateSet parse_set(const std::string& text, std::size_t n) {
  StateSet s(n);
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    long long v = -1;
    try {
      v = std::stoll(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size() || v < 0)
      throw Error(ErrorKind::BadParam, "set selector entry is not a state index: '" + item + "'");
    if (static_cast<std::size_t>(v) >= n)
      throw Error(ErrorKind::BadParam, "state index " + item + " out of range for n = " + std::to_string(n));
    s.insert(static_cast<std::size_t>(v));
  }
  return s;
}

StateSet choose_set(const Options& o, const ZooChain& z) {
  if (!o.set.empty()) return parse_set(o.set, z.chain.size());
  if (z.set) return *z.set;
  throw Error(ErrorKind::BadParam, "--set is required for this chain");
}

EnumerationOptions enumeration(const Options& o) { return {o.max_states, o.threads}; }

void require_epsilon(double e) {
  if (!(e > 0.0 && e < 1.0)) throw Error(ErrorKind::DomainError, "--epsilon must lie in (0, 1)");
}

void emit(const Options& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(o.out);
  if (!f) throw Error(ErrorKind::Parse, "cannot write " + o.out);
  f << text;
}

std::string human(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

int run_zoo(const Options& o) {
  if (!o.zoo.empty()) {
    const auto z = load(o);
    emit(o, dump_json(to_json(z.chain)));
    return kExitOk;
  }
  std::ostringstream os;
  for (const auto& f : zoo_catalog()) {
    os << f.name;
    for (const auto& p : f.params) os << ' ' << p.name << ':' << (p.kind == ParamKind::integer ? "int" : "real");
    os << "\n    " << f.summary << "\n";
    for (const auto& p : f.params) os << "    " << p.name << ": " << p.constraint << "\n";
  }
  emit(o, os.str());
  return kExitOk;
}

int run_analyze(const Options& o) {
  const auto z = load(o);
  const auto a = choose_set(o, z);
  const auto rev = time_reversal(z.chain);
  const MarkovChain& base = o.reversed ? rev : z.chain;
  const SetAnalysis sa(base, a);

  Json out;
  out["set"] = a.members();
  out["measure"] = sa.measure();
  out["spread"] = to_json(sa.record(o.reversed));
  Json grads = Json::array();
  for (const auto sign : {Sign::plus, Sign::minus})
    for (const auto p : {GradientOrder::one, GradientOrder::two, GradientOrder::infinity})
      grads.push_back(to_json(h_p(sa, p, sign)));
  out["gradients"] = std::move(grads);
  if (sa.measure() <= 0.5 + tol::kExact) {
    out["sandwich"] = Json{{"plus", to_json(sandwich(sa, Sign::plus))}, {"minus", to_json(sandwich(sa, Sign::minus))}};
  } else {
    out["sandwich"] = nullptr;
    out["caveats"] = Json::array({"sandwich omitted: pi(A) > 1/2"});
  }
  emit(o, dump_json(out));
  return kExitOk;
}

int run_profile(const Options& o) {
  const auto z = load(o);
  if (o.quantity.empty()) throw Error(ErrorKind::BadParam, "--quantity is required");
  const auto q = parse_quantity(o.quantity);
  if (!q) throw Error(ErrorKind::BadParam, "unknown quantity: " + o.quantity);
  Window w = default_window(*q);
  if (o.window == "at_most_x")
    w = Window::at_most_x;
  else if (o.window == "half_to_x")
    w = Window::half_to_x;
  else if (!o.window.empty())
    throw Error(ErrorKind::BadParam, "unknown window: " + o.window);

  const auto prof = profile(z.chain, *q, w, enumeration(o));
  if (o.format == "csv") {
    std::ostringstream os;
    prof.write_csv(os);
    emit(o, os.str());
  } else {
    Json j{{"quantity", std::string(to_string(prof.quantity))},
           {"window", std::string(to_string(prof.window))},
           {"power", prof.power},
           {"breakpoints", prof.breakpoints},
           {"coefficients", prof.coefficients},
           {"point_values", prof.point_values},
           {"discrete_outer_sets", prof.discrete_outer_sets}};
    emit(o, dump_json(j));
  }
  return kExitOk;
}

int run_bounds(const Options& o) {
  require_epsilon(o.epsilon);
  const auto z = load(o);
  emit(o, dump_json(to_json(mixing_report(z.chain, o.epsilon, enumeration(o)))));
  return kExitOk;
}

int run_mixing(const Options& o) {
  require_epsilon(o.epsilon);
  const auto z = load(o);
  const auto tau = exact_mixing(z.chain, o.epsilon, Metric::tv);
  const auto chi2 = exact_mixing(z.chain, o.epsilon, Metric::chi2);
  if (o.format == "csv") {
    emit(o, "epsilon,tau_exact,chi2_exact\n" + detail::format_real(o.epsilon, 17) + "," + std::to_string(tau) + "," +
                std::to_string(chi2) + "\n");
  } else {
    emit(o, dump_json(Json{{"epsilon", o.epsilon}, {"tau_exact", tau}, {"chi2_exact", chi2}}));
  }
  return kExitOk;
}

int run_verify(const Options& o) {
  const auto z = load(o);
  const auto report = verify(z.chain, enumeration(o));
  emit(o, dump_json(to_json(report)));
  std::cerr << "verify: " << report.subsets << " subsets, " << report.violations() << " violation(s)";
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& t : report.tallies)
    if (t.evaluated > 0) worst = std::max(worst, t.worst_gap);
  std::cerr << ", tightest gap " << human(worst) << "\n";
  return report.ok() ? kExitOk : kExitViolation;
}

void add_common(CLI::App* cmd, Options& o) {
  auto* chain = cmd->add_option("--chain", o.chain_file, "chain JSON file {\"n\", \"P\", \"pi\"?}");
  auto* zoo = cmd->add_option("--zoo", o.zoo, "zoo family followed by its parameters")->expected(1, -1);
  chain->excludes(zoo);
  zoo->excludes(chain);
  cmd->add_option("--out", o.out, "output path (default: stdout)");
  cmd->add_option("--threads", o.threads, "worker threads (default: $MIXISO_THREADS or all cores)");
  cmd->add_option("--max-states", o.max_states, "enumeration limit on the state count")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Isoperimetric profiles, gradient sandwiches and mixing bounds for finite Markov chains"};
  app.require_subcommand(1);
  Options o;

  auto* zoo = app.add_subcommand("zoo", "list chain families, or export one with --zoo FAMILY PARAMS");
  add_common(zoo, o);

  auto* analyze = app.add_subcommand("analyze", "set functionals, gradients and sandwich for one set");
  add_common(analyze, o);
  analyze->add_option("--set", o.set, "comma-separated state indices");
  analyze->add_flag("--reversed", o.reversed, "evaluate on the time reversal");

  auto* prof = app.add_subcommand("profile", "size profile of one quantity");
  add_common(prof, o);
  prof->add_option("--quantity", o.quantity, "quantity name")->required();
  prof->add_option("--window", o.window, "at_most_x | half_to_x");
  prof->add_option("--format", o.format, "json | csv")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();

  auto* bounds = app.add_subcommand("bounds", "mixing report: exact times next to every bound");
  add_common(bounds, o);
  bounds->add_option("--epsilon", o.epsilon, "target distance")->capture_default_str();

  auto* mixing = app.add_subcommand("mixing", "exact TV and chi^2 mixing times");
  add_common(mixing, o);
  mixing->add_option("--epsilon", o.epsilon, "target distance")->capture_default_str();
  mixing->add_option("--format", o.format, "json | csv")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();

  auto* ver = app.add_subcommand("verify", "check every inequality on every subset");
  add_common(ver, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (zoo->parsed()) return run_zoo(o);
    if (analyze->parsed()) return run_analyze(o);
    if (prof->parsed()) return run_profile(o);
    if (bounds->parsed()) return run_bounds(o);
    if (mixing->parsed()) return run_mixing(o);
    return run_verify(o);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
}
