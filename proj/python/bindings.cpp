#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "carp/baselines.hpp"
#include "carp/bench.hpp"
#include "carp/generator.hpp"
#include "carp/path_opt.hpp"
#include "carp/platform.hpp"
#include "carp/teacher.hpp"
#include "carp/training.hpp"

namespace py = pybind11;
using namespace carp;

namespace {

py::dict evaluation_dict(const Evaluation& ev) {
  py::dict d;
  d["total_cost"] = ev.total_cost;
  d["deadhead_cost"] = ev.deadhead_cost;
  d["feasible"] = ev.feasible;
  d["issues"] = ev.issues;
  return d;
}

Solution routes_to_solution(const Prepared& p, const std::vector<std::vector<int>>& routes) {
  Solution s{routes, 0, 0};
  return price(p.instance, p.dist, s);
}

}  // namespace

PYBIND11_MODULE(_pycarp, m) {
  m.doc() = "Capacitated arc routing: instances, classic solvers and the attention policy.";
  tune_allocator();

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<IllegalAction>(m, "IllegalAction", PyExc_ValueError);
  py::register_exception<DisconnectedGraph>(m, "DisconnectedGraph", PyExc_ValueError);

  py::class_<Edge>(m, "Edge")
      .def(py::init([](int u, int v, Cost cost, Cost demand) { return Edge{u, v, cost, demand, demand > 0}; }),
           py::arg("u"), py::arg("v"), py::arg("cost"), py::arg("demand") = 0)
      .def_readwrite("u", &Edge::u)
      .def_readwrite("v", &Edge::v)
      .def_readwrite("cost", &Edge::cost)
      .def_readwrite("demand", &Edge::demand)
      .def_readwrite("required", &Edge::required)
      .def("__repr__", [](const Edge& e) {
        return "Edge(" + std::to_string(e.u) + ", " + std::to_string(e.v) + ", cost=" + std::to_string(e.cost) +
               ", demand=" + std::to_string(e.demand) + ")";
      });

  py::class_<Instance>(m, "Instance")
      .def(py::init([](int node_count, int depot, Cost capacity, std::vector<Edge> edges, std::string name) {
             Instance inst;
             inst.name = std::move(name);
             inst.node_count = node_count;
             inst.depot = depot;
             inst.capacity = capacity;
             inst.edges = std::move(edges);
             return inst;
           }),
           py::arg("node_count"), py::arg("depot"), py::arg("capacity"), py::arg("edges"), py::arg("name") = "unnamed")
      .def_readwrite("name", &Instance::name)
      .def_readwrite("node_count", &Instance::node_count)
      .def_readwrite("depot", &Instance::depot)
      .def_readwrite("capacity", &Instance::capacity)
      .def_readwrite("edges", &Instance::edges)
      .def_property_readonly("required_edges", &Instance::required_edges)
      .def_property_readonly("service_cost", &Instance::service_cost)
      .def_property_readonly("total_demand", &Instance::total_demand)
      .def("validate", &validate_instance)
      .def("save", [](const Instance& i, const std::string& path) { save_instance(path, i); })
      .def_static("load", &load_instance, py::arg("path"));

  m.def("generate", [](const std::string& preset, int index, std::uint64_t seed) {
    DatasetSpec spec = dataset_preset(preset);
    spec.seed = seed;
    return generate_dataset_instance(spec, index);
  }, py::arg("preset") = "Task20-mini", py::arg("index") = 0, py::arg("seed") = 1,
     "Instance `index` of a synthetic dataset preset.");
  m.def("presets", &preset_names);

  m.def("shortest_paths", [](const Instance& inst) {
    const auto d = all_pairs_shortest_paths(inst);
    Eigen::Matrix<Cost, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> out(d.size(), d.size());
    for (int a = 0; a < d.size(); ++a)
      for (int b = 0; b < d.size(); ++b) out(a, b) = d(a, b);
    return out;
  }, py::arg("instance"));

  m.def("classical_mds", [](const Eigen::MatrixXd& dist, int dim) { return classical_mds(dist, dim).coords; },
        py::arg("dist"), py::arg("dim"));

  py::class_<Solution>(m, "Solution")
      .def_readonly("routes", &Solution::routes)
      .def_readonly("total_cost", &Solution::total_cost)
      .def_readonly("deadhead_cost", &Solution::deadhead_cost)
      .def("__repr__", [](const Solution& s) {
        return "Solution(routes=" + std::to_string(s.routes.size()) + ", total_cost=" + std::to_string(s.total_cost) + ")";
      });

  py::class_<Prepared>(m, "Prepared", "An instance with its distance matrix, arc graph and features.")
      .def(py::init(&prepare), py::arg("instance"), py::arg("mds_dim") = 8)
      .def_readonly("instance", &Prepared::instance)
      .def_property_readonly("arc_count", [](const Prepared& p) { return p.context.graph().size(); })
      .def("arc_weight", [](const Prepared& p, int from, int to) { return p.context.graph().weight(from, to); })
      .def("evaluate", [](const Prepared& p, const std::vector<std::vector<int>>& routes) {
        return evaluation_dict(evaluate_solution(p.instance, p.dist, Solution{routes, 0, 0}));
      }, py::arg("routes"), "Cost and feasibility of routes of directed arc ids.")
      .def("split", [](const Prepared& p, const std::vector<int>& order) {
        const SplitResult r = dp_split(order, p.context.graph());
        return routes_to_solution(p, split_to_solution(order, r).routes);
      }, py::arg("order"), "Optimal depot-return insertion for a fixed service order.")
      .def("labels", [](const Prepared& p, const std::vector<std::vector<int>>& routes) {
        return labelize(p.instance, p.context.graph(), p.dist, routes_to_solution(p, routes)).actions;
      }, py::arg("routes"), "Action sequence replaying a feasible solution.");

  py::class_<ModelConfig>(m, "ModelConfig")
      .def(py::init([](int d_h, int n_layers, int n_heads, double clip_c, int mds_dim) {
             ModelConfig c{d_h, n_layers, n_heads, clip_c, mds_dim};
             c.validate();
             return c;
           }),
           py::arg("d_h") = 128, py::arg("n_layers") = 3, py::arg("n_heads") = 8, py::arg("clip_c") = 10.0,
           py::arg("mds_dim") = 8)
      .def_readonly("d_h", &ModelConfig::d_h)
      .def_readonly("n_layers", &ModelConfig::n_layers)
      .def_readonly("n_heads", &ModelConfig::n_heads)
      .def_readonly("clip_c", &ModelConfig::clip_c)
      .def_readonly("mds_dim", &ModelConfig::mds_dim);

  py::class_<Policy>(m, "Policy")
      .def(py::init([](const ModelConfig& config, std::uint64_t seed) {
             Rng rng(seed);
             return Policy(config, rng);
           }),
           py::arg("config") = ModelConfig{}, py::arg("seed") = 1)
      .def_property_readonly("config", &Policy::config)
      .def_property_readonly("parameter_count", [](const Policy& p) { return p.params().scalar_count(); })
      .def("save", &Policy::save, py::arg("path"))
      .def_static("load", &Policy::load, py::arg("path"))
      .def("first_step_probabilities", [](const Policy& p, const Prepared& prep) {
        return action_probabilities(p, prep.context, EnvState::initial(prep.context.graph()));
      }, py::arg("prepared"));

  m.def("solve", [](const Prepared& p, const std::string& method, const std::string& mode, const Policy* policy,
                    int beam_width, std::uint64_t seed, long teacher_budget) {
    SolveOptions o;
    o.method = parse_method(method);
    o.mode = parse_mode(mode);
    o.policy = policy;
    o.beam_width = beam_width;
    o.seed = seed;
    o.teacher.budget = teacher_budget;
    py::gil_scoped_release release;
    return solve(p, o);
  }, py::arg("prepared"), py::arg("method") = "ps", py::arg("mode") = "greedy", py::arg("policy") = nullptr,
     py::arg("beam_width") = 2, py::arg("seed") = 1, py::arg("teacher_budget") = 10000,
     "Solve with ps, teacher, exact, daam or daam-po (the last two need a policy).");

  m.def("pretrain", [](Policy& policy, const std::vector<Prepared>& data, int epochs, int batch_size,
                       double learning_rate, std::uint64_t seed, long teacher_budget, int augment,
                       const std::vector<Prepared>& validation, int patience) {
    const auto label = [&](const std::vector<Prepared>& items, std::uint64_t salt) {
      std::vector<LabeledInstance> out;
      for (std::size_t i = 0; i < items.size(); ++i) {
        const auto& p = items[i];
        Rng rng(derive_seed(derive_seed(seed, salt), i));
        LocalSearchOptions opt;
        opt.budget = teacher_budget;
        const Solution sol = local_search_solve(p.instance, p.context.graph(), p.dist, opt, rng);
        out.push_back({p.context, labelize(p.instance, p.context.graph(), p.dist, sol)});
      }
      return out;
    };
    const auto labeled = label(data, 0);
    const auto val = label(validation, 1);
    SlConfig cfg;
    cfg.batch_size = batch_size;
    cfg.epochs = epochs;
    cfg.learning_rate = learning_rate;
    cfg.seed = seed;
    cfg.augment = augment;
    cfg.patience = patience;
    std::vector<py::dict> out;
    for (const auto& r : pretrain_sl(policy, labeled, cfg, {}, val)) {
      py::dict d;
      d["epoch"] = r.epoch;
      d["loss"] = r.mean_loss;
      d["accuracy"] = r.accuracy;
      if (r.validated) {
        d["val_loss"] = r.val_loss;
        d["val_accuracy"] = r.val_accuracy;
        d["best"] = r.best;
      }
      out.push_back(d);
    }
    return out;
  }, py::arg("policy"), py::arg("data"), py::arg("epochs") = 1, py::arg("batch_size") = 128,
     py::arg("learning_rate") = 1e-4, py::arg("seed") = 1, py::arg("teacher_budget") = 10000,
     py::arg("augment") = 1, py::arg("validation") = std::vector<Prepared>{}, py::arg("patience") = 0,
     "Label `data` with the local-search teacher, then run supervised pre-training in place. With "
     "`validation` the policy keeps its lowest-validation-loss epoch.");

  m.def("gap_percent", &gap_percent, py::arg("cost"), py::arg("reference"));
}
