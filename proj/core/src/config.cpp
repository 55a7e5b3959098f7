#include "ifcf/config.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "ifcf/errors.hpp"

namespace ifcf {

namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"model", {"n", "omega", "m", "a", "warp", "epsilon", "sigma_perturbation", "psi_amplitude"}},
      {"curvature", {"kind"}},
      {"grid", {"n", "N"}},
      {"initial", {"u0_mean", "u0_perturbation"}},
      {"flow",
       {"t_max", "cfl", "u_floor", "dt_min", "dt_max", "record_every", "snapshot_every", "far_future",
        "max_halvings", "trajectory_tracking", "seeds", "seed_offset"}},
      {"diagnostics", {"window_start", "window_end", "rate_factor", "c3_constant"}},
      {"output", {"dir"}},
  };
  return keys;
}

class Reader {
 public:
  explicit Reader(const pt::ptree& tree) : tree_(tree) {}

  template <typename T>
  T get(const std::string& section, const std::string& key, T fallback) const {
    const auto sec = tree_.get_child_optional(section);
    if (!sec) return fallback;
    const auto raw = sec->get_child_optional(pt::ptree::path_type(key, '\0'));
    if (!raw) return fallback;
    const std::string text = raw->data();
    try {
      if constexpr (std::is_same_v<T, std::string>) {
        return text;
      } else if constexpr (std::is_same_v<T, bool>) {
        if (text == "true" || text == "1" || text == "yes") return true;
        if (text == "false" || text == "0" || text == "no") return false;
        throw std::invalid_argument("not a boolean");
      } else {
        std::size_t used = 0;
        T value{};
        if constexpr (std::is_floating_point_v<T>) {
          value = static_cast<T>(std::stod(text, &used));
        } else {
          const long long parsed = std::stoll(text, &used);
          if (parsed < 0 && std::is_unsigned_v<T>) throw std::invalid_argument("negative");
          value = static_cast<T>(parsed);
        }
        if (used != text.size()) throw std::invalid_argument("trailing characters");
        return value;
      }
    } catch (const std::exception&) {
      fail(ErrorKind::Config, fmt::format("{}.{}: cannot parse '{}'", section, key, text));
    }
  }

  [[nodiscard]] bool has(const std::string& section, const std::string& key) const {
    const auto sec = tree_.get_child_optional(section);
    return sec && sec->get_child_optional(pt::ptree::path_type(key, '\0'));
  }

 private:
  const pt::ptree& tree_;
};

void require(bool condition, const std::string& message) {
  if (!condition) fail(ErrorKind::Config, message);
}

std::vector<Point> parse_seeds(const std::string& text) {
  std::vector<Point> out;
  std::stringstream all(text);
  std::string item;
  while (std::getline(all, item, ';')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    std::istringstream in(item);
    Point p{0.0, 0.0};
    std::string rest;
    if (!(in >> p[0])) fail(ErrorKind::Config, fmt::format("flow.seeds: cannot parse '{}'", item));
    in >> p[1];
    if (in.fail() && !in.eof()) fail(ErrorKind::Config, fmt::format("flow.seeds: cannot parse '{}'", item));
    in.clear();
    if (in >> rest) fail(ErrorKind::Config, fmt::format("flow.seeds: too many coordinates in '{}'", item));
    out.push_back(p);
  }
  return out;
}

std::string fnv1a(std::string_view text) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", hash);
}

std::string_view warp_name(WarpKind kind) {
  switch (kind) {
    case WarpKind::ExactPowerLaw: return "exact";
    case WarpKind::Perturbed: return "perturbed";
    case WarpKind::InversePerturbation: return "inverse";
  }
  return "exact";
}

}  // namespace

Field RunConfig::initial_data() const {
  return sample_field(grid, [&](std::span<const double> x) {
    double mode = 1.0;
    for (double xi : x) mode *= std::cos(xi);
    return u0_mean * (1.0 + u0_perturbation * mode);
  });
}

FlowProblem RunConfig::problem() const { return FlowProblem{grid, model, CurvatureFunction(curvature, grid.n)}; }

RunConfig parse_config(std::string_view text) {
  pt::ptree tree;
  try {
    std::istringstream in{std::string(text)};
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    fail(ErrorKind::Config, fmt::format("malformed config: {}", e.message()));
  }

  for (const auto& [section, body] : tree) {
    const auto it = known_keys().find(section);
    if (it == known_keys().end()) {
      fail(ErrorKind::Config, body.empty() ? fmt::format("key '{}' outside a section", section)
                                           : fmt::format("unknown section [{}]", section));
    }
    for (const auto& [key, value] : body) {
      if (!it->second.count(key)) fail(ErrorKind::Config, fmt::format("unknown key {}.{}", section, key));
    }
  }

  const Reader r(tree);
  RunConfig c;

  const int n = r.get<int>("model", "n", 2);
  const auto constants = ArwConstants::make(n, r.get<double>("model", "omega", 2.0), r.get<double>("model", "m", 1.0),
                                            r.get<double>("model", "a", -1.0));
  const std::string warp = r.get<std::string>("model", "warp", "exact");
  c.model = ArwModel::perturbed(constants, r.get<double>("model", "epsilon", 0.0),
                                r.get<double>("model", "sigma_perturbation", 0.0),
                                r.get<double>("model", "psi_amplitude", 0.0));
  if (warp == "exact") {
    c.model.warp.kind = WarpKind::ExactPowerLaw;
  } else if (warp == "perturbed") {
    c.model.warp.kind = WarpKind::Perturbed;
  } else if (warp == "inverse") {
    c.model.warp.kind = WarpKind::InversePerturbation;
  } else {
    fail(ErrorKind::Config, fmt::format("model.warp must be exact, perturbed or inverse, got '{}'", warp));
  }
  require(c.model.warp.kind != WarpKind::ExactPowerLaw || c.model.warp.epsilon == 0.0,
          "model.epsilon must be 0 for the exact warp");

  c.curvature = parse_curvature_kind(r.get<std::string>("curvature", "kind", "gauss_root"));

  const int grid_n = r.get<int>("grid", "n", n);
  require(grid_n == n, fmt::format("grid.n = {} must equal model.n = {}", grid_n, n));
  c.grid = Grid::make(grid_n, r.get<int>("grid", "N", 64));

  require(r.has("initial", "u0_mean"), "initial.u0_mean is required");
  c.u0_mean = r.get<double>("initial", "u0_mean", 0.0);
  c.u0_perturbation = r.get<double>("initial", "u0_perturbation", 0.0);

  auto& f = c.flow;
  f.t_max = r.get<double>("flow", "t_max", f.t_max);
  f.cfl = r.get<double>("flow", "cfl", f.cfl);
  f.u_floor = r.get<double>("flow", "u_floor", f.u_floor);
  f.dt_min = r.get<double>("flow", "dt_min", f.dt_min);
  f.dt_max = r.get<double>("flow", "dt_max", f.dt_max);
  f.record_every = r.get<std::size_t>("flow", "record_every", f.record_every);
  f.snapshot_every = r.get<std::size_t>("flow", "snapshot_every", f.snapshot_every);
  f.far_future_threshold = r.get<double>("flow", "far_future", f.far_future_threshold);
  f.max_halvings = r.get<int>("flow", "max_halvings", f.max_halvings);
  f.trajectory_tracking = r.get<bool>("flow", "trajectory_tracking", f.trajectory_tracking);
  f.seeds = parse_seeds(r.get<std::string>("flow", "seeds", ""));
  f.seed_offset = r.get<double>("flow", "seed_offset", f.seed_offset);

  require(f.t_max > 0.0, "flow.t_max must be positive");
  require(f.cfl > 0.0 && f.cfl <= 1.0, "flow.cfl must lie in (0, 1]");
  require(f.u_floor < 0.0, "flow.u_floor must be negative");
  require(f.dt_min > 0.0 && f.dt_min <= f.dt_max, "flow.dt_min must be positive and not above flow.dt_max");
  require(f.record_every >= 1, "flow.record_every must be at least 1");
  require(f.far_future_threshold < 0.0, "flow.far_future must be negative");
  require(f.max_halvings >= 0, "flow.max_halvings must be non-negative");
  require(f.seed_offset >= 0.0 && f.seed_offset < 0.5, "flow.seed_offset must lie in [0, 0.5)");
  require(!f.trajectory_tracking || !f.seeds.empty(), "flow.trajectory_tracking needs at least one seed");

  require(std::abs(c.u0_perturbation) < 1.0, "initial.u0_perturbation must satisfy |p| < 1");
  require(c.u0_mean < 0.0, fmt::format("initial.u0_mean must be negative, got {}", c.u0_mean));
  const double lowest = c.u0_mean * (1.0 + std::abs(c.u0_perturbation));
  require(lowest > f.far_future_threshold,
          fmt::format("initial data reaches {} <= flow.far_future = {}: not sufficiently far in the future", lowest,
                      f.far_future_threshold));
  require(lowest >= c.model.constants.a, fmt::format("initial data reaches {} below model.a", lowest));

  auto& d = c.diagnostics;
  d.window_start = r.get<double>("diagnostics", "window_start", d.window_start);
  d.window_end = r.get<double>("diagnostics", "window_end", d.window_end);
  d.rate_factor = r.get<double>("diagnostics", "rate_factor", d.rate_factor);
  d.c3_constant = r.get<double>("diagnostics", "c3_constant", d.c3_constant);
  require(0.0 <= d.window_start && d.window_start < d.window_end && d.window_end <= 1.0,
          "diagnostics window must satisfy 0 <= window_start < window_end <= 1");
  require(d.rate_factor > 0.0 && d.rate_factor <= 1.0, "diagnostics.rate_factor must lie in (0, 1]");
  require(d.c3_constant > 0.0, "diagnostics.c3_constant must be positive");

  // The hash identifies the computation, so the output location is left out.
  c.model_hash = fnv1a(canonical_text(c));
  c.output_dir = r.get<std::string>("output", "dir", "");
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, fmt::format("cannot read config '{}'", path.string()));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string canonical_text(const RunConfig& c) {
  const auto& k = c.model.constants;
  const auto& f = c.flow;
  std::string seeds;
  for (const auto& s : f.seeds) {
    if (!seeds.empty()) seeds += "; ";
    seeds += fmt::format("{:.17g} {:.17g}", s[0], s[1]);
  }
  std::map<std::string, std::map<std::string, std::string>> sections;
  auto real = [](double value) { return fmt::format("{:.17g}", value); };
  sections["curvature"]["kind"] = std::string(to_string(c.curvature));
  sections["diagnostics"] = {{"c3_constant", real(c.diagnostics.c3_constant)},
                             {"rate_factor", real(c.diagnostics.rate_factor)},
                             {"window_end", real(c.diagnostics.window_end)},
                             {"window_start", real(c.diagnostics.window_start)}};
  sections["flow"] = {{"cfl", real(f.cfl)},
                      {"dt_max", real(f.dt_max)},
                      {"dt_min", real(f.dt_min)},
                      {"far_future", real(f.far_future_threshold)},
                      {"max_halvings", std::to_string(f.max_halvings)},
                      {"record_every", std::to_string(f.record_every)},
                      {"seed_offset", real(f.seed_offset)},
                      {"seeds", seeds},
                      {"snapshot_every", std::to_string(f.snapshot_every)},
                      {"t_max", real(f.t_max)},
                      {"trajectory_tracking", f.trajectory_tracking ? "true" : "false"},
                      {"u_floor", real(f.u_floor)}};
  sections["grid"] = {{"N", std::to_string(c.grid.N)}, {"n", std::to_string(c.grid.n)}};
  sections["initial"] = {{"u0_mean", real(c.u0_mean)}, {"u0_perturbation", real(c.u0_perturbation)}};
  sections["model"] = {{"a", real(k.a)},
                       {"epsilon", real(c.model.warp.epsilon)},
                       {"m", real(k.m)},
                       {"n", std::to_string(k.n)},
                       {"omega", real(k.omega)},
                       {"psi_amplitude", real(c.model.psi.amplitude)},
                       {"sigma_perturbation", real(c.model.sigma.perturbation.cos_amplitude(0, 0))},
                       {"warp", std::string(warp_name(c.model.warp.kind))}};
  if (!c.output_dir.empty()) sections["output"]["dir"] = c.output_dir;

  std::string out;
  for (const auto& [name, keys] : sections) {
    out += fmt::format("[{}]\n", name);
    for (const auto& [key, value] : keys) out += fmt::format("{} = {}\n", key, value);
    out += "\n";
  }
  return out;
}

}  // namespace ifcf
