#include <chrono>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "crkit/report.hpp"

using namespace crkit;

namespace {

struct Inputs {
    json digests = json::object();

    std::string read(const std::string& path) {
        std::string text = read_file(path);
        digests[path] = fnv1a_digest(text);
        return text;
    }
    AnyManifold manifold(const std::string& path) { return manifold_from_json(read(path), path); }
    SeriesMap series(const std::string& path) { return series_from_json(read(path), path); }
};

std::uint64_t default_seed() {
    if (const char* env = std::getenv("CRKIT_SEED")) {
        try {
            return std::stoull(env, nullptr, 0);
        } catch (const std::exception&) {
            std::cerr << "crkit: ignoring unparsable CRKIT_SEED\n";
        }
    }
    return kDefaultSeed;
}

std::vector<std::size_t> parse_slots(const std::string& text) {
    std::vector<std::size_t> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto comma = text.find(',', start);
        std::string tok = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        if (tok.empty()) throw std::invalid_argument("empty entry in --slots");
        out.push_back(std::stoul(tok));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

int emit_error(const std::string& msg, std::size_t line, std::size_t column, bool pretty) {
    json e = {{"error", msg}};
    if (line > 0) {
        e["line"] = line;
        e["column"] = column;
    }
    std::cout << e.dump(pretty ? 2 : -1) << "\n";
    std::cerr << "crkit: " << msg << "\n";
    return static_cast<int>(Status::InputError);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact-arithmetic toolkit for real-algebraic CR submanifolds"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string seed_text;
    bool pretty = false, timing = false, assert_verdict = false;
    app.add_option("--seed", seed_text, "random seed (decimal or 0x hex); CRKIT_SEED sets the default");
    app.add_flag("--pretty", pretty, "indent the JSON output");
    app.add_flag("--timing", timing, "include wall-clock timing in the report");
    app.add_flag("--assert", assert_verdict, "exit with status 1 when the verdict is negative");

    std::string manifold_path, series_path, src_path, dst_path, points_path, point_text;
    int degree = 2, reciprocity = 0, a = 1, order = -1;
    std::vector<int> bounds{4, 4};
    std::string slots_text = "0";
    bool numeric = false;

    auto* analyze = app.add_subcommand("analyze", "codimension, CR rank, minimality, kappa and holomorphic fields");
    analyze->add_option("manifold", manifold_path)->required();
    analyze->add_option("--degree", degree, "degree bound for holomorphic tangent fields");

    auto* segre = app.add_subcommand("segre", "Segre variety of a point");
    segre->add_option("manifold", manifold_path)->required();
    segre->add_option("--point", point_text, "point as JSON [[re, im], ...]; defaults to the base point");
    segre->add_option("--reciprocity-samples", reciprocity, "number of sampled pairs for the reciprocity check");

    auto* transversal = app.add_subcommand("transversal", "Segre-transversality verdict and witness");
    transversal->add_option("manifold", manifold_path)->required();

    auto* kap = app.add_subcommand("kappa", "degeneracy degree, witness minor and exceptional locus");
    kap->add_option("manifold", manifold_path)->required();

    auto* straighten = app.add_subcommand("straighten", "split off linear product factors");
    straighten->add_option("manifold", manifold_path)->required();

    auto* orbit = app.add_subcommand("orbit", "Lie saturation and, optionally, numeric orbit dimension");
    orbit->add_option("manifold", manifold_path)->required();
    orbit->add_flag("--numeric", numeric, "also estimate the orbit dimension by concatenated flows");

    auto* reflect = app.add_subcommand("reflect", "first and double reflection dimension estimates");
    reflect->add_option("target", manifold_path)->required();
    reflect->add_option("--points", points_path, "JSON file with source points")->required();

    auto* trdeg = app.add_subcommand("trdeg", "transcendence degree estimate with certificates");
    trdeg->add_option("series", series_path)->required();
    trdeg->add_option("--bounds", bounds, "degree bounds Dz Dx")->expected(2);
    trdeg->add_option("--order", order, "truncation order N; defaults to the file's order");

    auto* maps = app.add_subcommand("maps-into", "check that a series map sends one manifold into another");
    maps->add_option("series", series_path)->required();
    maps->add_option("source", src_path)->required();
    maps->add_option("target", dst_path)->required();
    maps->add_option("--order", order, "truncation order N; defaults to the file's order");

    auto* perturb = app.add_subcommand("perturb", "add iterated-sine perturbations to chosen components");
    perturb->add_option("series", series_path)->required();
    perturb->add_option("--a", a, "power of the sine")->check(CLI::PositiveNumber);
    perturb->add_option("--slots", slots_text, "comma-separated component indices, first one is the base");

    auto* corpus_cmd = app.add_subcommand("corpus", "run the built-in examples against their recorded results");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return static_cast<int>(Status::InputError);
    }

    std::uint64_t seed = default_seed();
    if (!seed_text.empty()) {
        try {
            seed = std::stoull(seed_text, nullptr, 0);
        } catch (const std::exception&) {
            return emit_error("invalid --seed value: " + seed_text, 0, 0, pretty);
        }
    }

    auto* cmd = app.get_subcommands().front();
    Inputs in;
    Outcome out;
    auto t0 = std::chrono::steady_clock::now();
    try {
        if (cmd == analyze) {
            out = analyze_report(in.manifold(manifold_path), seed, degree);
        } else if (cmd == segre) {
            auto M = in.manifold(manifold_path);
            std::optional<PointC> p;
            if (!point_text.empty()) {
                try {
                    p = point_from_json(json::parse(point_text));
                } catch (const json::exception& e) {
                    throw InputError("--point", 0, 0, e.what());
                }
            }
            out = segre_report(M, p, reciprocity, seed);
        } else if (cmd == transversal) {
            out = transversal_report(in.manifold(manifold_path), seed);
        } else if (cmd == kap) {
            out = kappa_report(in.manifold(manifold_path), seed);
        } else if (cmd == straighten) {
            out = straighten_report(in.manifold(manifold_path), seed);
        } else if (cmd == orbit) {
            out = orbit_report(in.manifold(manifold_path), seed, numeric);
        } else if (cmd == reflect) {
            auto M = in.manifold(manifold_path);
            std::string text = in.read(points_path);
            out = reflect_report(M, detail::parse_json(text, points_path), seed);
        } else if (cmd == trdeg) {
            auto f = in.series(series_path);
            out = trdeg_report(f, bounds[0], bounds[1], order > 0 ? order : f.order);
        } else if (cmd == maps) {
            auto f = in.series(series_path);
            auto M = in.manifold(src_path);
            auto Mp = in.manifold(dst_path);
            out = maps_into_report(f, M, Mp, order > 0 ? order : f.order);
        } else if (cmd == perturb) {
            out = perturb_report(in.series(series_path), a, parse_slots(slots_text));
        } else if (cmd == corpus_cmd) {
            out = corpus_report(seed);
        }
    } catch (const InputError& e) {
        return emit_error(e.what(), e.line(), e.column(), pretty);
    } catch (const ParseError& e) {
        return emit_error(e.what(), 0, e.column(), pretty);
    } catch (const std::invalid_argument& e) {
        return emit_error(e.what(), 0, 0, pretty);
    } catch (const json::exception& e) {
        return emit_error(e.what(), 0, 0, pretty);
    } catch (const std::exception& e) {
        json err = {{"command", cmd->get_name()}, {"error", e.what()}, {"seed", seed}};
        std::cout << err.dump(pretty ? 2 : -1) << "\n";
        std::cerr << "crkit: " << e.what() << "\n";
        return static_cast<int>(Status::Capped);
    }

    json doc;
    doc["command"] = cmd->get_name();
    doc["seed"] = seed;
    doc["inputs"] = in.digests;
    doc["report"] = out.body;
    if (timing) {
        auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        doc["timing_ms"] = ms;
    }
    std::cout << doc.dump(pretty ? 2 : -1) << "\n";

    if (out.capped) return static_cast<int>(Status::Capped);
    if (out.negative && (assert_verdict || cmd == corpus_cmd)) return static_cast<int>(Status::Negative);
    return static_cast<int>(Status::Ok);
}
