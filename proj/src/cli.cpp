#include "permchan/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "permchan/accept.hpp"
#include "permchan/bounds.hpp"
#include "permchan/covering.hpp"
#include "permchan/exact.hpp"
#include "permchan/simulate.hpp"

namespace permchan::cli {

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class HelpRequested : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string join_counts(const std::vector<long long>& counts) {
  std::string out;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(counts[i]);
  }
  return out;
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << content;
  if (!out) throw std::runtime_error("failed writing output file: " + path);
}

std::string header_line(const ExperimentConfig& config, const ChannelModel* ch) {
  std::ostringstream os;
  os << "# " << kVersion << "; seed=" << config.seed;
  if (ch) os << "; channel=" << ch->hash();
  os << "\n";
  return os.str();
}

std::pair<long long, long long> parse_range(const std::string& text) {
  auto dots = text.find("..");
  if (dots == std::string::npos) {
    throw UsageError("range must look like 4..12: " + text);
  }
  try {
    long long lo = std::stoll(text.substr(0, dots));
    long long hi = std::stoll(text.substr(dots + 2));
    if (lo < 1 || hi < lo) throw UsageError("bad range: " + text);
    return {lo, hi};
  } catch (const UsageError&) {
    throw;
  } catch (const std::exception&) {
    throw UsageError("bad range: " + text);
  }
}

double effective_alpha(const ExperimentConfig& config) {
  return config.alpha > 0.0 ? config.alpha : bounds::kDefaultAlpha;
}

int run_capacity(const ExperimentConfig& config) {
  ChannelModel ch = parse_channel_file(config.channel_path);
  auto cap = bounds::capacity_value(ch);
  std::ostringstream os;
  os << header_line(config, &ch);
  os << "# class=" << to_string(cap.cls) << "; formula: " << cap.formula << "\n";
  if (cap.exact) {
    os << num(cap.value) << "\n";
  } else {
    os << "bounds-only lower=" << num(cap.lower) << " upper=" << num(cap.upper);
    if (cap.upper_conditional) os << " (upper conditional on worst-case input structure)";
    os << "\n";
  }
  write_output(config.out_path, os.str());
  return kExitOk;
}

int run_cover(const ExperimentConfig& config) {
  SimplexNet net = simplex_net(config.k, config.eps, config.gamma);
  std::ostringstream os;
  os << header_line(config, nullptr);
  os << "# k=" << config.k << "; eps=" << num(config.eps) << "; gamma=" << num(config.gamma)
     << "; centers=" << net.centers.size() << "; measured_c=" << num(net.measured_c) << "\n";
  os << "index";
  for (int j = 0; j < config.k; ++j) os << ",p" << (j + 1);
  os << "\n";
  for (std::size_t i = 0; i < net.centers.size(); ++i) {
    os << i;
    for (double v : net.centers[i]) os << "," << num(v);
    os << "\n";
  }
  if (config.certify) {
    double radius = covering_radius(net, *config.certify);
    os << "# certificate: resolution=" << *config.certify << " measured_radius=" << num(radius)
       << " pass=" << (radius <= config.eps ? "true" : "false") << "\n";
  }
  write_output(config.out_path, os.str());
  return kExitOk;
}

int run_divergence(const ExperimentConfig& config) {
  ChannelModel ch = parse_channel_file(config.channel_path);
  std::ostringstream os;
  os << header_line(config, &ch);

  std::optional<ProbVector> fixed_q;
  if (config.q) fixed_q = ProbVector(*config.q);

  if (config.profile) {
    std::vector<long long> ns;
    for (long long n = config.profile->first; n <= config.profile->second; ++n) ns.push_back(n);
    auto rows = exact::gap_profile(ch,
                                   fixed_q ? exact::QMode::Fixed : exact::QMode::MarginalPY,
                                   ns, fixed_q);
    os << "n,max_gap_nats,argmax_pi,divergence_at_max_nats\n";
    for (const auto& row : rows) {
      os << row.n << "," << num(row.max_gap) << "," << join_counts(row.argmax_pi.counts) << ","
         << num(row.divergence_at_max) << "\n";
    }
    write_output(config.out_path, os.str());
    return kExitOk;
  }

  if (config.pi.empty()) throw UsageError("divergence needs --pi");
  NTypeVector pi(config.pi);
  if (config.n && pi.n() != *config.n) {
    throw UsageError("--pi counts must sum to --n");
  }
  ProbVector q = fixed_q ? *fixed_q : output_marginal(pi.distribution(), ch);
  auto rep = exact::divergence_exact(pi, ch, q);
  os << "n,pi,q,term_iid_nats,gap_nats,direct_nats,residual,infinite,zero_symbols\n";
  os << rep.n << "," << join_counts(rep.pi.counts) << ",";
  for (std::size_t j = 0; j < rep.q.size(); ++j) os << (j ? " " : "") << num(rep.q[j]);
  os << "," << num(rep.term_iid) << "," << num(rep.gap) << "," << num(rep.direct) << ","
     << num(rep.residual) << "," << (rep.infinite ? "true" : "false") << ",";
  for (std::size_t j = 0; j < rep.zero_symbols.size(); ++j) {
    os << (j ? " " : "") << rep.zero_symbols[j];
  }
  os << "\n";
  write_output(config.out_path, os.str());
  return kExitOk;
}

int run_bounds(const ExperimentConfig& config) {
  ChannelModel ch = parse_channel_file(config.channel_path);
  auto table = bounds::bound_table(ch, config.n, effective_alpha(config));
  std::ostringstream os;
  os << header_line(config, &ch);
  os << "# alpha=" << num(effective_alpha(config)) << " (all divergence values in nats)\n";
  if (config.format == "text") {
    for (const auto& row : table) {
      char line[256];
      std::snprintf(line, sizeof line, "%-16s %-24s %14s  %s\n", row.name.c_str(),
                    row.inputs.c_str(), num(row.value).c_str(), row.note.c_str());
      os << line;
    }
  } else {
    os << "name,inputs,value,note\n";
    for (const auto& row : table) {
      os << row.name << "," << row.inputs << "," << num(row.value) << "," << row.note << "\n";
    }
  }
  write_output(config.out_path, os.str());
  return kExitOk;
}

std::string sweep_svg(const std::vector<simulate::SweepCell>& cells) {
  // Minimal self-contained line chart: one polyline per rate, x = ln n,
  // y = error rate.
  const double width = 640, height = 420, left = 70, right = 610, top = 30, bottom = 380;
  const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  std::vector<double> rates;
  double x_min = 1e300, x_max = -1e300, y_max = 0.0;
  for (const auto& c : cells) {
    if (!c.feasible) continue;
    if (std::find(rates.begin(), rates.end(), c.rate) == rates.end()) rates.push_back(c.rate);
    double x = std::log(static_cast<double>(c.n));
    x_min = std::min(x_min, x);
    x_max = std::max(x_max, x);
    y_max = std::max(y_max, c.outcome.error_rate);
  }
  if (rates.empty()) return "<svg xmlns=\"http://www.w3.org/2000/svg\"/>\n";
  if (y_max <= 0.0) y_max = 1.0;
  if (x_max <= x_min) x_max = x_min + 1.0;
  auto sx = [&](double x) { return left + (x - x_min) / (x_max - x_min) * (right - left); };
  auto sy = [&](double y) { return bottom - y / y_max * (bottom - top); };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<line x1=\"" << left << "\" y1=\"" << bottom << "\" x2=\"" << right << "\" y2=\""
     << bottom << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << bottom
     << "\" stroke=\"black\"/>\n";
  os << "<text x=\"" << (left + right) / 2 << "\" y=\"" << height - 8
     << "\" font-size=\"13\" text-anchor=\"middle\">block length n (log scale)</text>\n";
  os << "<text x=\"16\" y=\"" << (top + bottom) / 2
     << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
     << (top + bottom) / 2 << ")\">error rate</text>\n";
  os << "<text x=\"" << left << "\" y=\"" << bottom + 16
     << "\" font-size=\"11\" text-anchor=\"middle\">" << num(std::exp(x_min)) << "</text>\n";
  os << "<text x=\"" << right << "\" y=\"" << bottom + 16
     << "\" font-size=\"11\" text-anchor=\"middle\">" << num(std::exp(x_max)) << "</text>\n";
  os << "<text x=\"" << left - 6 << "\" y=\"" << top + 4
     << "\" font-size=\"11\" text-anchor=\"end\">" << num(y_max) << "</text>\n";
  os << "<text x=\"" << left - 6 << "\" y=\"" << bottom + 4
     << "\" font-size=\"11\" text-anchor=\"end\">0</text>\n";

  for (std::size_t r = 0; r < rates.size(); ++r) {
    const char* color = palette[r % 6];
    std::ostringstream pts;
    for (const auto& c : cells) {
      if (!c.feasible || c.rate != rates[r]) continue;
      pts << num(sx(std::log(static_cast<double>(c.n)))) << ","
          << num(sy(c.outcome.error_rate)) << " ";
    }
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\""
       << pts.str() << "\"/>\n";
    for (const auto& c : cells) {
      if (!c.feasible || c.rate != rates[r]) continue;
      os << "<circle cx=\"" << num(sx(std::log(static_cast<double>(c.n)))) << "\" cy=\""
         << num(sy(c.outcome.error_rate)) << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";
    }
    os << "<text x=\"" << right - 4 << "\" y=\"" << top + 14.0 * static_cast<double>(r)
       << "\" font-size=\"12\" text-anchor=\"end\" fill=\"" << color << "\">R="
       << num(rates[r]) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

int run_simulate(const ExperimentConfig& config) {
  ChannelModel ch = parse_channel_file(config.channel_path);
  if (config.rates.empty() || config.ns.empty()) {
    throw UsageError("simulate needs --rates and --ns");
  }
  auto cells = simulate::sweep_rate(ch, config.rates, config.ns, config.trials, config.seed);
  std::ostringstream os;
  os << header_line(config, &ch);
  os << "# trials=" << config.trials << "\n";
  os << "rate,n,M,trials,errors,err_rate,wilson_lo,wilson_hi\n";
  for (const auto& c : cells) {
    if (!c.feasible) {
      os << "# infeasible: rate=" << num(c.rate) << " n=" << c.n << " (" << c.note << ")\n";
      continue;
    }
    os << num(c.rate) << "," << c.n << "," << c.message_count << "," << c.outcome.trials << ","
       << c.outcome.errors << "," << num(c.outcome.error_rate) << ","
       << num(c.outcome.wilson_lo) << "," << num(c.outcome.wilson_hi) << "\n";
  }
  write_output(config.out_path, os.str());
  if (!config.svg_path.empty()) write_output(config.svg_path, sweep_svg(cells));
  return kExitOk;
}

int run_verify(const ExperimentConfig& config) {
  auto results = accept::run_suite(config.suite);
  bool all_pass = true;
  std::ostringstream os;
  for (const auto& r : results) {
    os << accept::format_result_line(r) << "\n";
    all_pass = all_pass && r.pass;
  }
  write_output(config.out_path, os.str());
  return all_pass ? kExitOk : kExitVerification;
}

}  // namespace

ExperimentConfig parse_args(const std::vector<std::string>& args) {
  ExperimentConfig config;
  CLI::App app{"noisy permutation channel laboratory"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  std::string profile_text;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--out", config.out_path, "output file (default stdout)");
    cmd->add_option("--format", config.format, "csv or text")
        ->check(CLI::IsMember({"csv", "text"}));
    cmd->add_option("--seed", config.seed, "random seed echoed into headers");
  };

  CLI::App* capacity = app.add_subcommand("capacity", "capacity of a channel");
  capacity->add_option("--channel", config.channel_path, "channel spec file")->required();
  add_common(capacity);

  CLI::App* cover = app.add_subcommand("cover", "divergence covering net of the simplex");
  cover->add_option("--k", config.k, "alphabet size")->check(CLI::Range(2, 12));
  cover->add_option("--eps", config.eps, "covering radius")
      ->check(CLI::Range(1e-9, 1.0))
      ->required();
  cover->add_option("--gamma", config.gamma, "scalar grid constant")->check(CLI::PositiveNumber);
  long long certify_m = 0;
  cover->add_option("--certify", certify_m, "certify on the lattice at this resolution")
      ->check(CLI::Range(2ll, 1000000ll));
  add_common(cover);

  CLI::App* divergence = app.add_subcommand("divergence", "exact divergence and decomposition");
  divergence->add_option("--channel", config.channel_path, "channel spec file")->required();
  long long n_flag = 0;
  divergence->add_option("--n", n_flag, "block length")->check(CLI::Range(1ll, 1000000ll));
  divergence->add_option("--pi", config.pi, "input type counts, comma separated")
      ->delimiter(',');
  std::vector<double> q_flag;
  divergence->add_option("--q", q_flag, "reference distribution Q")->delimiter(',');
  divergence->add_option("--profile", profile_text, "worst-case gap profile over n range a..b");
  add_common(divergence);

  CLI::App* bounds_cmd = app.add_subcommand("bounds", "closed-form bound table");
  bounds_cmd->add_option("--channel", config.channel_path, "channel spec file")->required();
  long long bounds_n = 0;
  bounds_cmd->add_option("--n", bounds_n, "block length for n-dependent bounds")
      ->check(CLI::Range(1ll, 100000000ll));
  bounds_cmd->add_option("--alpha", config.alpha, "concentration constant")
      ->check(CLI::PositiveNumber);
  add_common(bounds_cmd);

  CLI::App* simulate_cmd = app.add_subcommand("simulate", "Monte-Carlo coding experiments");
  simulate_cmd->add_option("--channel", config.channel_path, "channel spec file")->required();
  simulate_cmd->add_option("--rates", config.rates, "rates R = log M / log n")
      ->delimiter(',')
      ->required();
  simulate_cmd->add_option("--ns", config.ns, "block lengths")->delimiter(',')->required();
  simulate_cmd->add_option("--trials", config.trials, "trials per cell")
      ->check(CLI::Range(1ll, 100000000ll));
  simulate_cmd->add_option("--svg", config.svg_path, "also emit a line chart");
  add_common(simulate_cmd);

  CLI::App* verify = app.add_subcommand("verify", "run the acceptance suites");
  verify->add_option("--suite", config.suite, "all|sandwich|covering|capacity|simulate|bounds|oracle")
      ->check(CLI::IsMember({"all", "sandwich", "covering", "capacity", "simulate", "bounds", "oracle"}));
  add_common(verify);

  std::vector<const char*> argv;
  argv.push_back("permchan");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested(app.help());
  } catch (const CLI::CallForVersion&) {
    throw HelpRequested(std::string(kVersion) + "\n");
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  config.subcommand = app.get_subcommands().front()->get_name();
  if (capacity->parsed() || bounds_cmd->parsed() || divergence->parsed()) {
    if (divergence->parsed() && n_flag > 0) config.n = n_flag;
    if (bounds_cmd->parsed() && bounds_n > 0) config.n = bounds_n;
  }
  if (cover->parsed() && certify_m > 0) config.certify = certify_m;
  if (divergence->parsed()) {
    if (!q_flag.empty()) config.q = q_flag;
    if (!profile_text.empty()) config.profile = parse_range(profile_text);
  }
  return config;
}

int run(const ExperimentConfig& config) {
  try {
    if (config.subcommand == "capacity") return run_capacity(config);
    if (config.subcommand == "cover") return run_cover(config);
    if (config.subcommand == "divergence") return run_divergence(config);
    if (config.subcommand == "bounds") return run_bounds(config);
    if (config.subcommand == "simulate") return run_simulate(config);
    if (config.subcommand == "verify") return run_verify(config);
    throw UsageError("unknown subcommand: " + config.subcommand);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

int main_entry(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  ExperimentConfig config;
  try {
    config = parse_args(args);
  } catch (const HelpRequested& h) {
    std::cout << h.what();
    return kExitOk;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }
  return run(config);
}

}  // namespace permchan::cli
