#include "ltlfmuc.h"

#include "CLI11.hpp"
#include "json.hpp"

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using json = nlohmann::ordered_json;

namespace {

// Exit codes: 0 done, 1 usage or parse error, 2 timeout with partial
// output, 3 resource budget exceeded (including sink write failure).
enum ExitCode { kDone = 0, kUsage = 1, kTimeout = 2, kResource = 3 };

struct Config {
    std::string path;
    std::string split = "recursive";
    bool conjuncts_file = false;
    std::uint64_t max_k = 0;
    double timeout_s = 0.0;
    bool deterministic = false;
    bool verify = false;
    std::string format = "json";
    std::uint64_t k = 0;  // kbounded / export-asp
};

muc_options make_options(const Config& cfg) {
    muc_options opt;
    muc_options_init(&opt);
    opt.max_k = cfg.max_k;
    opt.timeout_s = cfg.timeout_s;
    opt.deterministic = cfg.deterministic ? 1 : 0;
    opt.verify = cfg.verify ? 1 : 0;
    if (const char* s = std::getenv("LTLFMUC_VAR_BUDGET"))
        opt.var_budget = std::strtoull(s, nullptr, 10);
    if (const char* s = std::getenv("LTLFMUC_STATE_BUDGET"))
        opt.state_budget = std::strtoull(s, nullptr, 10);
    return opt;
}

bool read_file(const std::string& path, std::string& out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return false;
    std::ostringstream ss;
    ss << in.rdbuf();
    out = ss.str();
    return true;
}

std::vector<std::string> nonblank_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::string cur;
    std::istringstream in(text);
    while (std::getline(in, cur)) {
        if (cur.find_first_not_of(" \t\r") != std::string::npos)
            lines.push_back(cur);
    }
    return lines;
}

// Parses the instance file according to the configured reading mode.
// Returns nullptr after printing a diagnostic.
muc_spec* load_spec(const Config& cfg, const std::string& path) {
    std::string text;
    if (!read_file(path, text)) {
        std::cerr << "error: cannot read " << path << "\n";
        return nullptr;
    }
    muc_spec* spec = nullptr;
    muc_status rc;
    if (cfg.conjuncts_file) {
        std::vector<std::string> lines = nonblank_lines(text);
        std::vector<const char*> ptrs;
        ptrs.reserve(lines.size());
        for (const auto& l : lines) ptrs.push_back(l.c_str());
        rc = muc_spec_parse_lines(ptrs.data(), ptrs.size(), &spec);
    } else {
        rc = muc_spec_parse(text.c_str(), cfg.split == "recursive" ? 1 : 0,
                            &spec);
    }
    if (rc != MUC_OK) {
        std::cerr << "error: " << path << ": " << muc_last_error() << "\n";
        return nullptr;
    }
    return spec;
}

std::string join_indices(const size_t* v, size_t n) {
    std::string out;
    for (size_t i = 0; i < n; ++i) {
        if (i) out += ",";
        out += std::to_string(v[i]);
    }
    return out;
}

struct EmitCtx {
    const muc_spec* spec;
    bool json_mode;
    bool write_failed = false;
};

bool emit_line(EmitCtx& ctx, const std::string& line) {
    std::cout << line << "\n" << std::flush;
    if (!std::cout) {
        ctx.write_failed = true;
        return false;
    }
    return true;
}

std::string conjunct_list_text(const muc_spec* spec, const size_t* v,
                               size_t n) {
    std::string out;
    for (size_t i = 0; i < n; ++i) {
        if (i) out += " ; ";
        char* t = muc_spec_conjunct_text(spec, v[i]);
        out += t ? t : "?";
        muc_string_free(t);
    }
    return out;
}

json stats_json(const muc_run_stats& st) {
    return json{{"type", "stats"},
                {"n_mucs", st.n_mucs},
                {"complete", st.complete != 0},
                {"final_k", st.final_k},
                {"muc_size_min", st.muc_size_min},
                {"muc_size_med", st.muc_size_med},
                {"muc_size_max", st.muc_size_max},
                {"gen_ms", st.gen_ms},
                {"cert_ms", st.cert_ms},
                {"wall_ms", st.wall_ms}};
}

int event_cb(const muc_event* e, void* user) {
    auto& ctx = *static_cast<EmitCtx*>(user);
    std::string line;
    if (ctx.json_mode) {
        json j;
        switch (e->type) {
            case MUC_EVENT_MUC:
                j = {{"type", "muc"},
                     {"conjuncts",
                      std::vector<size_t>(e->conjuncts,
                                          e->conjuncts + e->n_conjuncts)},
                     {"k", e->k},
                     {"t_ms", e->t_ms}};
                break;
            case MUC_EVENT_DEEPEN:
                j = {{"type", "deepen"},
                     {"from_k", e->from_k},
                     {"to_k", e->to_k},
                     {"witness_of",
                      std::vector<size_t>(e->conjuncts,
                                          e->conjuncts + e->n_conjuncts)}};
                break;
            case MUC_EVENT_DISPROVED:
                j = {{"type", "disproved"},
                     {"conjuncts",
                      std::vector<size_t>(e->conjuncts,
                                          e->conjuncts + e->n_conjuncts)},
                     {"k", e->k},
                     {"witness_len", e->witness_len}};
                break;
            case MUC_EVENT_STATS:
                j = stats_json(*e->stats);
                break;
            case MUC_EVENT_ERROR:
                j = {{"type", "error"},
                     {"message", e->message ? e->message : ""}};
                break;
        }
        line = j.dump();
    } else {
        switch (e->type) {
            case MUC_EVENT_MUC:
                line = "muc [" + join_indices(e->conjuncts, e->n_conjuncts) +
                       "] k=" + std::to_string(e->k) + ": " +
                       conjunct_list_text(ctx.spec, e->conjuncts,
                                          e->n_conjuncts);
                break;
            case MUC_EVENT_DEEPEN:
                line = "deepen " + std::to_string(e->from_k) + " -> " +
                       std::to_string(e->to_k) + " (witness for [" +
                       join_indices(e->conjuncts, e->n_conjuncts) + "])";
                break;
            case MUC_EVENT_DISPROVED:
                line = "disproved [" +
                       join_indices(e->conjuncts, e->n_conjuncts) +
                       "] at k=" + std::to_string(e->k) +
                       ", witness length " + std::to_string(e->witness_len);
                break;
            case MUC_EVENT_STATS:
                line = "stats: " + std::to_string(e->stats->n_mucs) +
                       " muc(s), " +
                       (e->stats->complete ? "complete" : "incomplete") +
                       ", final k " + std::to_string(e->stats->final_k);
                break;
            case MUC_EVENT_ERROR:
                line = std::string("error: ") +
                       (e->message ? e->message : "");
                break;
        }
    }
    return emit_line(ctx, line) ? 0 : 1;
}

int exit_code_for(muc_status rc, const EmitCtx* ctx) {
    switch (rc) {
        case MUC_OK:
            return kDone;
        case MUC_ERR_TIMEOUT:
            return kTimeout;
        case MUC_ERR_RESOURCE:
            return kResource;
        case MUC_ERR_CALLBACK:
            // only the CLI's own sink can abort, and only on write failure
            if (ctx && ctx->write_failed)
                std::cerr << "error: output write failure\n";
            return kResource;
        default:
            std::cerr << "error: " << muc_last_error() << "\n";
            return kUsage;
    }
}

int run_enumerate(const Config& cfg, bool fixed_k) {
    muc_spec* spec = load_spec(cfg, cfg.path);
    if (!spec) return kUsage;
    muc_options opt = make_options(cfg);
    EmitCtx ctx{spec, cfg.format == "json"};
    muc_status rc =
        fixed_k ? muc_enumerate_k(spec, cfg.k, &opt, event_cb, &ctx, nullptr)
                : muc_enumerate(spec, &opt, event_cb, &ctx, nullptr);
    if (rc == MUC_ERR_TIMEOUT || rc == MUC_ERR_RESOURCE)
        std::cerr << "error: " << muc_last_error() << "\n";
    muc_spec_free(spec);
    return exit_code_for(rc, &ctx);
}

int run_single(const Config& cfg) {
    muc_spec* spec = load_spec(cfg, cfg.path);
    if (!spec) return kUsage;
    muc_options opt = make_options(cfg);
    size_t* core = nullptr;
    size_t n = 0;
    uint64_t k = 0;
    auto started = std::chrono::steady_clock::now();
    muc_status rc = muc_find_one(spec, &opt, &core, &n, &k);
    double t_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - started)
                      .count();
    int code = exit_code_for(rc, nullptr);
    if (rc == MUC_OK && n > 0) {
        EmitCtx ctx{spec, cfg.format == "json"};
        if (ctx.json_mode) {
            json j = {{"type", "muc"},
                      {"conjuncts", std::vector<size_t>(core, core + n)},
                      {"k", k},
                      {"t_ms", t_ms}};
            emit_line(ctx, j.dump());
        } else {
            emit_line(ctx, "muc [" + join_indices(core, n) +
                               "] k=" + std::to_string(k) + ": " +
                               conjunct_list_text(spec, core, n));
        }
        if (ctx.write_failed) code = kResource;
    } else if (rc != MUC_OK) {
        std::cerr << "error: " << muc_last_error() << "\n";
    }
    muc_indices_free(core);
    muc_spec_free(spec);
    return code;
}

int run_sat(const Config& cfg) {
    muc_spec* spec = load_spec(cfg, cfg.path);
    if (!spec) return kUsage;
    muc_options opt = make_options(cfg);
    uint64_t len = 0;
    muc_status rc = muc_check_sat(spec, &opt, &len);
    muc_spec_free(spec);
    if (rc != MUC_OK) {
        std::cerr << "error: " << muc_last_error() << "\n";
        return exit_code_for(rc, nullptr);
    }
    std::cout << len << "\n";
    return kDone;
}

int run_export(const Config& cfg) {
    muc_spec* spec = load_spec(cfg, cfg.path);
    if (!spec) return kUsage;
    char* program = muc_export_asp(spec, cfg.k);
    muc_spec_free(spec);
    if (!program) {
        std::cerr << "error: " << muc_last_error() << "\n";
        return kUsage;
    }
    std::cout << program;
    muc_string_free(program);
    return kDone;
}

std::string csv_double(double v) {
    std::ostringstream ss;
    ss << v;
    return ss.str();
}

int run_bench(const Config& cfg) {
    namespace fs = std::filesystem;
    std::error_code ec;
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(cfg.path, ec))
        if (entry.is_regular_file()) files.push_back(entry.path());
    if (ec) {
        std::cerr << "error: cannot read directory " << cfg.path << "\n";
        return kUsage;
    }
    std::sort(files.begin(), files.end());

    std::cout << "instance,n_conjuncts,n_mucs,complete,final_k,muc_size_min,"
                 "muc_size_med,muc_size_max,gen_ms,cert_ms,wall_ms\n";
    bool any_failed = false;
    for (const auto& file : files) {
        muc_spec* spec = load_spec(cfg, file.string());
        if (!spec) {
            any_failed = true;
            continue;
        }
        muc_options opt = make_options(cfg);
        muc_run_stats st{};
        muc_status rc = muc_enumerate(spec, &opt, nullptr, nullptr, &st);
        if (rc != MUC_OK && rc != MUC_ERR_TIMEOUT && rc != MUC_ERR_RESOURCE) {
            std::cerr << "error: " << file.string() << ": "
                      << muc_last_error() << "\n";
            any_failed = true;
            muc_spec_free(spec);
            continue;
        }
        std::cout << file.filename().string() << ","
                  << muc_spec_conjunct_count(spec) << "," << st.n_mucs << ","
                  << (st.complete ? 1 : 0) << "," << st.final_k << ","
                  << st.muc_size_min << "," << csv_double(st.muc_size_med)
                  << "," << st.muc_size_max << "," << csv_double(st.gen_ms)
                  << "," << csv_double(st.cert_ms) << ","
                  << csv_double(st.wall_ms) << "\n";
        muc_spec_free(spec);
    }
    std::cout << std::flush;
    return any_failed ? kUsage : kDone;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Minimal unsatisfiable core enumeration for finite-trace "
                 "temporal specifications"};
    app.require_subcommand(1);

    Config cfg;
    std::size_t gen_conjuncts = 20, gen_atoms = 5, gen_depth = 3;
    std::uint64_t gen_seed = 0;

    auto add_input_flags = [&cfg](CLI::App* cmd, bool with_engine_flags) {
        cmd->add_option("file", cfg.path, "instance file")->required();
        cmd->add_option("--split", cfg.split,
                        "how to split the input into conjuncts")
            ->check(CLI::IsMember({"root", "recursive"}))
            ->capture_default_str();
        cmd->add_flag("--conjuncts-file", cfg.conjuncts_file,
                      "input holds one conjunct per line");
        if (with_engine_flags) {
            cmd->add_option("--max-k", cfg.max_k,
                            "abort instead of deepening past this depth");
            cmd->add_option("--timeout", cfg.timeout_s,
                            "wall-clock limit in seconds")
                ->check(CLI::PositiveNumber);
            cmd->add_flag("--deterministic", cfg.deterministic,
                          "disable pipelined generation");
            cmd->add_flag("--verify", cfg.verify,
                          "independently recheck every emitted core");
            cmd->add_option("--format", cfg.format, "event rendering")
                ->check(CLI::IsMember({"json", "text"}))
                ->capture_default_str();
        }
    };

    CLI::App* enumerate =
        app.add_subcommand("enumerate", "stream every minimal core");
    add_input_flags(enumerate, true);

    CLI::App* single =
        app.add_subcommand("single", "report the first certified core");
    add_input_flags(single, true);

    CLI::App* kbounded =
        app.add_subcommand("kbounded", "single fixed-depth pass");
    add_input_flags(kbounded, true);
    kbounded->add_option("--k", cfg.k, "probe depth")
        ->required()
        ->check(CLI::PositiveNumber);

    CLI::App* sat = app.add_subcommand(
        "sat", "minimal model length of the conjunction, 0 if unsatisfiable");
    add_input_flags(sat, false);
    sat->add_option("--timeout", cfg.timeout_s, "wall-clock limit in seconds")
        ->check(CLI::PositiveNumber);

    CLI::App* export_asp =
        app.add_subcommand("export-asp", "ground-fact probe export");
    add_input_flags(export_asp, false);
    export_asp->add_option("--k", cfg.k, "probe depth")
        ->required()
        ->check(CLI::PositiveNumber);

    CLI::App* bench = app.add_subcommand(
        "bench", "run enumerate over a directory, emit per-instance CSV");
    bench->add_option("dir", cfg.path, "instance directory")->required();
    bench->add_option("--split", cfg.split)
        ->check(CLI::IsMember({"root", "recursive"}));
    bench->add_flag("--conjuncts-file", cfg.conjuncts_file);
    bench->add_option("--max-k", cfg.max_k);
    bench->add_option("--timeout", cfg.timeout_s,
                      "per-instance wall-clock limit in seconds")
        ->check(CLI::PositiveNumber);
    bench->add_flag("--deterministic", cfg.deterministic);

    CLI::App* gen =
        app.add_subcommand("gen", "random conjunction instance generator");
    gen->add_option("--conjuncts", gen_conjuncts)->capture_default_str();
    gen->add_option("--atoms", gen_atoms)->capture_default_str();
    gen->add_option("--depth", gen_depth)->capture_default_str();
    gen->add_option("--seed", gen_seed)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    if (enumerate->parsed()) return run_enumerate(cfg, false);
    if (single->parsed()) return run_single(cfg);
    if (kbounded->parsed()) return run_enumerate(cfg, true);
    if (sat->parsed()) return run_sat(cfg);
    if (export_asp->parsed()) return run_export(cfg);
    if (bench->parsed()) return run_bench(cfg);
    if (gen->parsed()) {
        char* inst = muc_generate(gen_conjuncts, gen_atoms, gen_depth,
                                  gen_seed);
        if (!inst) {
            std::cerr << "error: " << muc_last_error() << "\n";
            return kUsage;
        }
        std::cout << inst;
        muc_string_free(inst);
        return kDone;
    }
    return kUsage;
}
