#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <optional>
#include <string>
#include <vector>

#include "lrbs/data.hpp"
#include "lrbs/error.hpp"
#include "lrbs/eval.hpp"
#include "lrbs/optimizer.hpp"

namespace py = pybind11;
using namespace lrbs;

namespace {

Direction parse_direction(const std::string& direction) {
    if (direction == "x") return Direction::x_queries_z;
    if (direction == "z") return Direction::z_queries_x;
    throw ValidationError("direction must be 'x' or 'z', got '" + direction + "'");
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Low-rank bilinear similarity learning for cross-modal retrieval.\n"
              "Feature matrices are dim x count: one sample per column.";

    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const IoError& e) {
            PyErr_SetString(PyExc_OSError, e.what());
        } catch (const ValidationError& e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        } catch (const NumericalError& e) {
            PyErr_SetString(PyExc_ArithmeticError, e.what());
        }
    });

    // --- linear algebra ----------------------------------------------------

    py::class_<PcaProjection>(m, "PcaProjection",
                              "Energy-threshold principal component projection.")
        .def_property_readonly("mean", [](const PcaProjection& p) { return p.mean; })
        .def_property_readonly("basis", [](const PcaProjection& p) { return p.basis; })
        .def_readonly("retained_energy", &PcaProjection::retained_energy)
        .def_property_readonly("input_dim", &PcaProjection::input_dim)
        .def_property_readonly("components", &PcaProjection::components)
        .def(
            "apply", [](const PcaProjection& p, const Matrix& x) { return pca_apply(p, x); },
            py::arg("x"), "Center and project dim x count features to components x count.")
        .def("__repr__", [](const PcaProjection& p) {
            return "PcaProjection(" + std::to_string(p.input_dim()) + " -> " +
                   std::to_string(p.components()) + " dims, energy " +
                   std::to_string(p.retained_energy) + ")";
        });

    m.def("pca_fit", &pca_fit, py::arg("x"), py::arg("energy"),
          "Fit the smallest projection whose eigenvalue mass reaches the energy "
          "fraction. x is dim x samples.");

    m.def(
        "svd",
        [](const Matrix& a) {
            SvdResult r = svd(a);
            return py::make_tuple(r.u, r.sigma, r.v);
        },
        py::arg("a"), "Thin SVD truncated at numerical rank; returns (u, sigma, v).");

    m.def("svt", &svt, py::arg("l"), py::arg("gamma"),
          "Singular value thresholding: shrink each singular value by gamma, clip at 0.");
    m.def("nuclear_norm", &nuclear_norm, py::arg("a"), "Sum of singular values.");
    m.def("numerical_rank", &numerical_rank, py::arg("a"));

    // --- supervision and loss ----------------------------------------------

    m.def(
        "build_supervision",
        [](const std::vector<int>& a_labels, const std::vector<int>& b_labels) {
            PairSupervision s = build_supervision(a_labels, b_labels);
            return py::make_tuple(s.y, s.w);
        },
        py::arg("a_labels"), py::arg("b_labels"),
        "Cross-pair sign matrix Y (+1 same class, -1 otherwise) and balance "
        "weights W (each sign class carries unit total mass); returns (y, w).");

    m.def(
        "pair_objective",
        [](const Matrix& x, const std::vector<int>& x_labels, const Matrix& z,
           const std::vector<int>& z_labels, const Matrix& m_mat, double lambda) {
            LossContext ctx = make_context({x, x_labels}, {z, z_labels});
            return objective_full(ctx, m_mat, lambda);
        },
        py::arg("x"), py::arg("x_labels"), py::arg("z"), py::arg("z_labels"), py::arg("m"),
        py::arg("lambda_") = 0.0,
        "Weighted logistic pair loss of the bilinear matrix m, plus lambda_ "
        "times its nuclear norm.");

    m.def(
        "pair_gradient",
        [](const Matrix& x, const std::vector<int>& x_labels, const Matrix& z,
           const std::vector<int>& z_labels, const Matrix& m_mat) {
            LossContext ctx = make_context({x, x_labels}, {z, z_labels});
            return gradient_smooth(ctx, m_mat);
        },
        py::arg("x"), py::arg("x_labels"), py::arg("z"), py::arg("z_labels"), py::arg("m"),
        "Gradient of the smooth part of the pair loss at m.");

    // --- training ----------------------------------------------------------

    py::class_<TraceRow>(m, "TraceRow", "One optimizer iterate's statistics.")
        .def_readonly("iter", &TraceRow::iter)
        .def_readonly("objective", &TraceRow::objective)
        .def_readonly("smooth", &TraceRow::smooth)
        .def_readonly("nuclear", &TraceRow::nuclear)
        .def_readonly("eta", &TraceRow::eta)
        .def_readonly("momentum", &TraceRow::momentum)
        .def_readonly("rank", &TraceRow::rank)
        .def("__repr__", [](const TraceRow& r) {
            return "TraceRow(iter=" + std::to_string(r.iter) +
                   ", objective=" + std::to_string(r.objective) +
                   ", rank=" + std::to_string(r.rank) + ")";
        });

    py::class_<SimilarityModel>(m, "SimilarityModel",
                                "Learned bilinear matrix plus optional per-modality "
                                "PCA projections.")
        .def_property_readonly("m", [](const SimilarityModel& s) { return s.m; })
        .def_property_readonly("lambda_", [](const SimilarityModel& s) { return s.lambda; })
        .def_property_readonly("pca_x", [](const SimilarityModel& s) { return s.pca_x; })
        .def_property_readonly("pca_z", [](const SimilarityModel& s) { return s.pca_z; })
        .def_readonly("metadata", &SimilarityModel::metadata)
        .def(
            "save",
            [](const SimilarityModel& s, const std::filesystem::path& path) {
                save_model(s, path);
            },
            py::arg("path"), "Write the binary model container.")
        .def("__repr__", [](const SimilarityModel& s) {
            return "SimilarityModel(" + std::to_string(s.m.rows()) + "x" +
                   std::to_string(s.m.cols()) + ", lambda=" + std::to_string(s.lambda) + ")";
        });

    py::class_<TrainResult>(m, "TrainResult")
        .def_readonly("model", &TrainResult::model)
        .def_readonly("trace", &TrainResult::trace)
        .def_readonly("converged", &TrainResult::converged);

    m.def(
        "train",
        [](const Matrix& x, const std::vector<int>& x_labels, const Matrix& z,
           const std::vector<int>& z_labels, double lambda, int max_iters, double tol,
           double eta0, double shrink, std::optional<double> pca_energy,
           std::uint64_t seed) {
            TrainConfig cfg;
            cfg.lambda = lambda;
            cfg.max_iters = max_iters;
            cfg.rel_tol = tol;
            cfg.eta0 = eta0;
            cfg.backtrack_shrink = shrink;
            cfg.seed = seed;
            return train_pipeline({x, x_labels}, {z, z_labels}, cfg, pca_energy);
        },
        py::arg("x"), py::arg("x_labels"), py::arg("z"), py::arg("z_labels"), py::kw_only(),
        py::arg("lambda_") = 0.0, py::arg("max_iters") = 500, py::arg("tol") = 1e-6,
        py::arg("eta0") = 1.0, py::arg("shrink") = 0.5, py::arg("pca_energy") = py::none(),
        py::arg("seed") = 0,
        "Accelerated proximal gradient training of the bilinear similarity.\n"
        "Features are dim x count with one class label per column. When\n"
        "pca_energy is given, each modality is reduced first (fit on this\n"
        "training data) and the projections travel with the model.");

    m.def("load_model", &load_model, py::arg("path"));

    // --- scoring and metrics -----------------------------------------------

    m.def(
        "score",
        [](const SimilarityModel& model, const Matrix& queries, const Matrix& gallery,
           const std::string& direction) {
            return score_all(model, queries, gallery, parse_direction(direction));
        },
        py::arg("model"), py::arg("queries"), py::arg("gallery"), py::arg("direction") = "x",
        "Bilinear scores of every query column against every gallery column;\n"
        "direction 'x' means the queries are x-side features, 'z' the reverse.\n"
        "Stored PCA projections are applied to raw features automatically.");

    m.def("average_precision", &average_precision, py::arg("relevance"),
          "AveP over a full 0/1 relevance list.");

    py::class_<MetricReport>(m, "MetricReport")
        .def_readonly("map", &MetricReport::map)
        .def_readonly("per_query_ap", &MetricReport::per_query_ap)
        .def_readonly("pr_curve", &MetricReport::pr_curve)
        .def_readonly("scope_curve", &MetricReport::scope_curve)
        .def("__repr__", [](const MetricReport& r) {
            return "MetricReport(map=" + std::to_string(r.map) + ", " +
                   std::to_string(r.per_query_ap.size()) + " queries)";
        });

    m.def(
        "evaluate",
        [](const Matrix& scores, const std::vector<int>& query_labels,
           const std::vector<int>& gallery_labels, std::optional<std::vector<int>> scopes) {
            if (!scopes) scopes = default_scopes(scores.cols());
            return evaluate(scores, query_labels, gallery_labels, *scopes);
        },
        py::arg("scores"), py::arg("query_labels"), py::arg("gallery_labels"),
        py::arg("scopes") = py::none(),
        "MAP, per-query AP, interpolated precision-recall on a 20-level recall\n"
        "grid, and a precision-scope curve (default scopes: 1, 2, 5, 10, ...).");

    // --- data --------------------------------------------------------------

    py::class_<LabeledModality>(m, "LabeledModality",
                                "dim x count features with one class label per column.")
        .def(py::init([](const Matrix& features, const std::vector<int>& labels) {
                 LabeledModality mod{features, labels};
                 validate_modality(mod, "LabeledModality");
                 return mod;
             }),
             py::arg("features"), py::arg("labels"))
        .def_property_readonly("features",
                               [](const LabeledModality& mod) { return mod.features; })
        .def_readonly("labels", &LabeledModality::labels)
        .def("__repr__", [](const LabeledModality& mod) {
            return "LabeledModality(dim=" + std::to_string(mod.features.rows()) +
                   ", count=" + std::to_string(mod.features.cols()) + ")";
        });

    py::class_<DatasetBundle>(m, "DatasetBundle")
        .def_readonly("train_x", &DatasetBundle::train_x)
        .def_readonly("train_z", &DatasetBundle::train_z)
        .def_readonly("test_x", &DatasetBundle::test_x)
        .def_readonly("test_z", &DatasetBundle::test_z)
        .def_readonly("name", &DatasetBundle::name);

    m.def(
        "generate_synthetic",
        [](int classes, int latent_dim, int dim_x, int dim_z, int per_class_train,
           int per_class_test, double noise_sigma, std::uint64_t seed) {
            SyntheticSpec spec;
            spec.classes = classes;
            spec.latent_dim = latent_dim;
            spec.dim_x = dim_x;
            spec.dim_z = dim_z;
            spec.per_class_train = per_class_train;
            spec.per_class_test = per_class_test;
            spec.noise_sigma = noise_sigma;
            spec.seed = seed;
            return generate_synthetic(spec);
        },
        py::arg("classes") = 5, py::arg("latent_dim") = 4, py::arg("dim_x") = 30,
        py::arg("dim_z") = 20, py::arg("per_class_train") = 20, py::arg("per_class_test") = 10,
        py::arg("noise_sigma") = 0.3, py::arg("seed") = 42,
        "Two modalities over shared latent class centers, embedded through "
        "random orthonormal maps; deterministic for a fixed seed.");

    m.def("load_modality", &load_modality, py::arg("features_path"), py::arg("labels_path"),
          "Read a one-sample-per-row feature CSV plus a label file.");
    m.def(
        "save_modality",
        [](const LabeledModality& mod, const std::filesystem::path& features_path,
           const std::filesystem::path& labels_path) {
            save_modality(mod, features_path, labels_path);
        },
        py::arg("modality"), py::arg("features_path"), py::arg("labels_path"));
}
