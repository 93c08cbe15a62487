#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>

#include "nextcrop/ablation.hpp"
#include "nextcrop/app/commands.hpp"
#include "nextcrop/app/config.hpp"
#include "nextcrop/checkpoint.hpp"
#include "nextcrop/codebook.hpp"
#include "nextcrop/error.hpp"
#include "nextcrop/layout.hpp"
#include "nextcrop/markov.hpp"
#include "nextcrop/metrics.hpp"
#include "nextcrop/prompt.hpp"
#include "nextcrop/ptok.hpp"
#include "nextcrop/scheduler.hpp"
#include "nextcrop/tiny_model.hpp"

namespace py = pybind11;
using namespace nextcrop;

namespace {

using TokenArray = py::array_t<std::uint32_t, py::array::c_style | py::array::forcecast>;
using PixelArray = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;

TokenGrid to_grid(const TokenArray& array) {
  if (array.ndim() != 2) throw py::value_error("token grid must be a 2-D array");
  const auto rows = static_cast<std::size_t>(array.shape(0));
  const auto cols = static_cast<std::size_t>(array.shape(1));
  return TokenGrid(rows, cols, TokenSeq(array.data(), array.data() + rows * cols));
}

py::array_t<std::uint32_t> from_grid(const TokenGrid& grid) {
  py::array_t<std::uint32_t> out({grid.rows(), grid.cols()});
  std::memcpy(out.mutable_data(), grid.tokens().data(), grid.size() * sizeof(TokenId));
  return out;
}

PixelImage to_image(const PixelArray& array) {
  if (array.ndim() != 3 || array.shape(2) != 3) {
    throw py::value_error("image must be an (height, width, 3) uint8 array");
  }
  const auto h = static_cast<std::size_t>(array.shape(0));
  const auto w = static_cast<std::size_t>(array.shape(1));
  return PixelImage(h, w, std::vector<std::uint8_t>(array.data(), array.data() + h * w * 3));
}

py::array_t<std::uint8_t> from_image(const PixelImage& img) {
  py::array_t<std::uint8_t> out({img.height(), img.width(), std::size_t{3}});
  std::memcpy(out.mutable_data(), img.samples().data(), img.samples().size());
  return out;
}

py::tuple result_tuple(const PanoramaResult& r) {
  return py::make_tuple(from_grid(r.grid), r.trace.to_jsonl());
}

// Generators are shared with Python; the scheduler only borrows them.
using GeneratorPtr = std::shared_ptr<TokenGenerator>;

SamplingParams sampling(double temperature, std::uint32_t top_k, std::uint64_t seed) {
  return SamplingParams{temperature, top_k, seed};
}

py::dict report_dict(const MetricReport& report) {
  py::list seams;
  for (const auto& s : report.seams) {
    py::dict d;
    d["seam"] = s.seam;
    d["tv"] = s.tv;
    d["ssim"] = s.ssim;
    seams.append(d);
  }
  py::dict out;
  out["seams"] = seams;
  out["tv_mean"] = report.tv_mean;
  out["tv_std"] = report.tv_std;
  out["ssim_mean"] = report.ssim_mean;
  out["ssim_std"] = report.ssim_std;
  out["wall_ms"] = report.wall_ms;
  return out;
}

}  // namespace

PYBIND11_MODULE(_nextcrop, m) {
  m.doc() = "Next-crop panorama token generation and seam coherence metrics.";

  py::exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      const py::object type = py::module_::import("nextcrop._nextcrop").attr("Error");
      py::object instance = type(e.what());
      instance.attr("code") = std::string(to_string(e.code()));
      instance.attr("exit_code") = exit_code(e.code());
      PyErr_SetObject(type.ptr(), instance.ptr());
    }
  });

  m.def("encode_prompt", [](const std::string& text) { return encode_prompt(text).values; },
        py::arg("text"), "Unit-norm prompt embedding (64 values).");

  py::class_<Codebook>(m, "Codebook")
      .def_property_readonly("size", &Codebook::size)
      .def_property_readonly("dim", &Codebook::dim)
      .def_property_readonly("patch_size", &Codebook::patch_size)
      .def("embedding",
           [](const Codebook& cb, TokenId t) {
             const auto e = cb.embedding(t);
             return std::vector<double>(e.begin(), e.end());
           })
      .def("color", &Codebook::color)
      .def("nearest", [](const Codebook& cb, const std::vector<double>& target) {
        return cb.nearest(target);
      })
      .def("to_bytes", [](const Codebook& cb) {
        const auto b = encode_pcbk(cb);
        return py::bytes(reinterpret_cast<const char*>(b.data()), b.size());
      });
  m.def("build_codebook", &build_codebook, py::arg("size"), py::arg("dim"), py::arg("seed"),
        py::arg("patch_size") = kDefaultPatchSize);
  m.def("decode_tokens", [](const TokenArray& grid, const Codebook& cb) {
    return from_image(decode_tokens(to_grid(grid), cb));
  });
  m.def("encode_image", [](const PixelArray& image, const Codebook& cb) {
    return from_grid(encode_image(to_image(image), cb));
  });
  m.def("blend_boundary",
        [](TokenId prev, TokenId cur, double lambda, const Codebook& cb) {
          return blend_boundary(cb.embedding(prev), cb.embedding(cur), lambda, cb);
        },
        py::arg("previous"), py::arg("current"), py::arg("lam"), py::arg("codebook"));

  py::class_<ExpansionPlan>(m, "ExpansionPlan")
      .def_static("vertical", &ExpansionPlan::vertical, py::arg("side"), py::arg("n"),
                  py::arg("rows"))
      .def_static("horizontal", &ExpansionPlan::horizontal, py::arg("side"), py::arg("n"),
                  py::arg("cols"))
      .def_static("both", &ExpansionPlan::both, py::arg("side"), py::arg("n_vertical"),
                  py::arg("rows"), py::arg("n_horizontal"), py::arg("cols"))
      .def_property_readonly("mode", [](const ExpansionPlan& p) { return std::string(to_string(p.mode)); })
      .def_readonly("side", &ExpansionPlan::side)
      .def_property_readonly("final_rows", &ExpansionPlan::final_rows)
      .def_property_readonly("final_cols", &ExpansionPlan::final_cols)
      .def_property_readonly("expansion_steps", &ExpansionPlan::expansion_steps);
  m.def("stride_columns",
        [](const std::string& stride, std::size_t side) { return Rational::parse(stride).scale(side); },
        py::arg("stride"), py::arg("side"), "c = u * s; raises unless integral.");
  m.def("iterations_for", &iterations_for, py::arg("target_px"), py::arg("side"),
        py::arg("step"), py::arg("patch_size"));

  py::class_<TokenGenerator, GeneratorPtr>(m, "Generator")
      .def_property_readonly("vocab_size", &TokenGenerator::vocab_size)
      .def_property_readonly("capacity", &TokenGenerator::capacity)
      .def("generate",
           [](const TokenGenerator& gen, std::optional<std::string> prompt, TokenSeq prefix,
              std::size_t count, std::tuple<std::uint64_t, std::uint64_t, std::uint64_t> stream,
              double temperature, std::uint32_t top_k) {
             ConditioningContext ctx;
             if (prompt) ctx.prompt = encode_prompt(*prompt);
             ctx.prefix = std::move(prefix);
             ctx.stream = StreamKey{std::get<0>(stream), std::get<1>(stream), std::get<2>(stream)};
             return gen.generate(ctx, count, sampling(temperature, top_k, ctx.stream.seed));
           },
           py::arg("prompt"), py::arg("prefix"), py::arg("count"), py::arg("stream"),
           py::arg("temperature") = 1.0, py::arg("top_k") = 0);
  m.def("markov_generator",
        [](std::size_t vocab, std::size_t order, const std::string& prompt, std::size_t capacity) {
          return GeneratorPtr(make_markov_generator(vocab, order, encode_prompt(prompt), capacity));
        },
        py::arg("vocab"), py::arg("order"), py::arg("prompt"), py::arg("capacity"));
  m.def("load_generator",
        [](const std::string& path, std::size_t capacity) -> GeneratorPtr {
          auto ck = read_pmdl(path);
          if (auto* tiny = std::get_if<TinyCausalModel>(&ck)) {
            return std::make_shared<TinyModelGenerator>(
                std::make_shared<const TinyCausalModel>(std::move(*tiny)));
          }
          auto& markov = std::get<MarkovCheckpoint>(ck);
          return std::make_shared<MarkovGenerator>(std::move(markov.table),
                                                   capacity ? capacity : markov.capacity);
        },
        py::arg("path"), py::arg("capacity") = 0, "Generator from a PMDL checkpoint.");

  m.def("generate_panorama",
        [](const ExpansionPlan& plan, const std::string& prompt, const GeneratorPtr& gen,
           std::uint64_t seed, double temperature, std::uint32_t top_k, bool parallel) {
          py::gil_scoped_release release;
          auto r = generate_panorama(plan, encode_prompt(prompt), *gen,
                                     sampling(temperature, top_k, seed), SchedulerOptions{parallel, 0});
          py::gil_scoped_acquire acquire;
          return result_tuple(r);
        },
        py::arg("plan"), py::arg("prompt"), py::arg("generator"), py::arg("seed") = 0,
        py::arg("temperature") = 1.0, py::arg("top_k") = 0, py::arg("parallel") = false,
        "Returns (token grid, trace as JSON lines).");
  m.def("baseline_independent",
        [](const ExpansionPlan& plan, const std::string& prompt, const GeneratorPtr& gen,
           std::uint64_t seed, double temperature, std::uint32_t top_k) {
          return result_tuple(baseline_independent(plan, encode_prompt(prompt), *gen,
                                                   sampling(temperature, top_k, seed)));
        },
        py::arg("plan"), py::arg("prompt"), py::arg("generator"), py::arg("seed") = 0,
        py::arg("temperature") = 1.0, py::arg("top_k") = 0);
  m.def("layout_generate",
        [](const ExpansionPlan& plan, const std::string& layout_json, const GeneratorPtr& gen,
           const Codebook& cb, std::uint64_t seed, double temperature, std::uint32_t top_k) {
          return result_tuple(layout_generate(plan, LayoutSpec::parse_json(layout_json), *gen, cb,
                                              sampling(temperature, top_k, seed)));
        },
        py::arg("plan"), py::arg("layout_json"), py::arg("generator"), py::arg("codebook"),
        py::arg("seed") = 0, py::arg("temperature") = 1.0, py::arg("top_k") = 0);
  m.def("image_guided_generate",
        [](const ExpansionPlan& plan, const PixelArray& guide, const std::string& prompt,
           const GeneratorPtr& gen, const Codebook& cb, std::uint64_t seed, double temperature,
           std::uint32_t top_k) {
          return result_tuple(image_guided_generate(plan, to_image(guide), encode_prompt(prompt),
                                                    *gen, cb, sampling(temperature, top_k, seed)));
        },
        py::arg("plan"), py::arg("guide"), py::arg("prompt"), py::arg("generator"),
        py::arg("codebook"), py::arg("seed") = 0, py::arg("temperature") = 1.0,
        py::arg("top_k") = 0);

  m.def("tv_seam",
        [](const PixelArray& img, std::size_t seam, std::size_t half_width) {
          return tv_seam(to_image(img), seam, half_width);
        },
        py::arg("image"), py::arg("seam_x"), py::arg("half_width") = 8);
  m.def("ssim", [](const PixelArray& a, const PixelArray& b) {
    return ssim(to_image(a), to_image(b));
  });
  m.def("coh",
        [](const std::vector<std::pair<double, double>>& tv_ssim) {
          std::vector<MetricTuple> runs;
          for (const auto& [tv, s] : tv_ssim) runs.push_back(MetricTuple{{}, {}, tv, s});
          auto r = coh(runs);
          return py::make_tuple(r.scores, r.warnings);
        },
        py::arg("tv_ssim"), "COH from (tv, ssim) pairs; returns (scores, warnings).");
  m.def("evaluate_panorama",
        [](const PixelArray& img, std::size_t crop_side, std::size_t half_width) {
          return report_dict(evaluate_panorama(to_image(img), EvalOptions{crop_side, half_width}));
        },
        py::arg("image"), py::arg("crop_side") = 512, py::arg("half_width") = 8);

  m.def("encode_ptok",
        [](const TokenArray& grid, std::uint32_t vocab) {
          const auto b = encode_ptok({to_grid(grid), vocab});
          return py::bytes(reinterpret_cast<const char*>(b.data()), b.size());
        },
        py::arg("grid"), py::arg("codebook_size"));
  m.def("decode_ptok", [](const py::bytes& data) {
    const std::string s = data;
    const auto file = decode_ptok(std::span(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
    return py::make_tuple(from_grid(file.grid), file.codebook_size);
  });

  m.def("default_config", [] { return app::RunConfig().to_ini(); },
        "Built-in configuration as INI text.");
  m.def("run_command",
        [](const std::string& command, const std::string& ini, const std::string& input) {
          app::RunConfig config;
          config.merge_ini(ini);
          app::CommandResult r;
          if (command == "generate") r = app::cmd_generate(config);
          else if (command == "layout") r = app::cmd_layout(config);
          else if (command == "guide") r = app::cmd_guide(config);
          else if (command == "evaluate") r = app::cmd_evaluate(config, input);
          else if (command == "ablate") r = app::cmd_ablate(config);
          else if (command == "train-tiny") r = app::cmd_train_tiny(config);
          else throw py::value_error("unknown command '" + command + "'");
          std::vector<std::string> files;
          for (const auto& f : r.files) files.push_back(f.string());
          return py::make_tuple(files, r.summary);
        },
        py::arg("command"), py::arg("config_ini") = "", py::arg("input") = "",
        "Runs a CLI command with INI overrides; returns (files written, summary).");
}
