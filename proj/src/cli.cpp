#include "hgm/cli.hpp"

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>

#include "hgm/datum.hpp"
#include "hgm/gamma_cache.hpp"
#include "hgm/oracle.hpp"

namespace hgm {

std::string csv_header() { return "p,class,e,residue,trace,method"; }

std::string emit_record(const TraceResult& r, OutputFormat f) {
    const bool computed = r.residue.has_value();
    const std::string residue = computed ? r.residue->value().get_str() : "";
    const std::string trace = r.lifted ? r.lifted->get_str() : "";
    const std::string method = computed ? to_string(r.method) : "";
    std::ostringstream os;
    if (f == OutputFormat::Csv) {
        os << r.p << ',' << to_string(r.cls) << ',' << r.e << ',' << residue << ',' << trace << ',' << method;
        return os.str();
    }
    os << "{\"p\":" << r.p << ",\"class\":\"" << to_string(r.cls) << "\",\"e\":" << r.e
       << ",\"residue\":" << (computed ? residue : "null") << ",\"trace\":" << (r.lifted ? trace : "null")
       << ",\"method\":" << (computed ? "\"" + method + "\"" : "null") << "}";
    return os.str();
}

std::optional<RunConfig> parse_command_line(int argc, const char* const* argv, std::ostream& out, std::ostream& err,
                                            int& code) {
    CLI::App app{"Frobenius traces of hypergeometric motives for all primes up to a limit"};
    RunConfig cfg;
    std::string z_text, format = "jsonl", oracle = "0";
    int precision = 0;
    app.add_option("--alpha", cfg.alpha, "comma-separated fractions, e.g. 1/4,3/4")->required();
    app.add_option("--beta", cfg.beta, "comma-separated fractions, e.g. 1/6,5/6")->required();
    app.add_option("--z", z_text, "specialization point a/b")->required();
    app.add_option("--limit", cfg.limit, "largest prime considered (X)")->required();
    app.add_option("--precision", precision, "p-adic precision e (default ceil((w+1)/2))");
    app.add_option("--output", cfg.output, "output file (default stdout)");
    app.add_option("--format", format, "jsonl or csv")->check(CLI::IsMember({"jsonl", "csv"}));
    app.add_option("--cache-dir", cfg.cache_dir, "gamma table cache (default $HGM_CACHE_DIR or ~/.cache/hgm)");
    app.add_flag("--no-cache", cfg.no_cache, "recompute gamma tables");
    app.add_option("--oracle-check", oracle, "recheck N good primes (or all) by the direct formula");
    app.add_option("--threads", cfg.threads, "OpenMP threads, 0 = auto")->check(CLI::NonNegativeNumber);
    app.add_flag("--phase-timings", cfg.phase_timings, "report per-phase wall time on stderr");
    try {
        app.parse(argc, argv);
        cfg.z = Fraction::parse(z_text);
        if (precision != 0) {
            if (precision < 1) throw CLI::ValidationError("--precision", "must be >= 1");
            cfg.precision = precision;
        }
        cfg.format = format == "csv" ? OutputFormat::Csv : OutputFormat::Jsonl;
        if (oracle == "all") {
            cfg.oracle_check.reset();
        } else {
            std::size_t used = 0;
            long long n = std::stoll(oracle, &used);
            if (used != oracle.size() || n < 0) throw CLI::ValidationError("--oracle-check", "expects N or all");
            cfg.oracle_check = static_cast<std::uint64_t>(n);
        }
        if (cfg.limit < 2) throw CLI::ValidationError("--limit", "must be >= 2");
    } catch (const CLI::ParseError& e) {
        code = app.exit(e, out, err);
        if (code == 0) return std::nullopt;
        code = kUsage;
        return std::nullopt;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        code = kUsage;
        return std::nullopt;
    }
    code = kOk;
    return cfg;
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    HypergeometricDatum datum;
    try {
        datum = validate_datum(parse_fraction_list(cfg.alpha), parse_fraction_list(cfg.beta));
        if (cfg.z == Fraction(0) || cfg.z == Fraction(1)) throw std::invalid_argument("z must not be 0 or 1");
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    }

    std::unique_ptr<GammaCache> cache;
    if (!cfg.no_cache) cache = std::make_unique<GammaCache>(cfg.cache_dir.empty() ? default_cache_dir() : cfg.cache_dir);

    TraceOptions opts;
    opts.e = cfg.precision.value_or(0);
    opts.threads = cfg.threads;
    opts.cache = cache.get();
    PhaseTimings timings;
    opts.timings = &timings;

    std::vector<TraceResult> results;
    try {
        results = hypergeometric_traces(datum, cfg.z, cfg.limit, opts);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kRuntime;
    }

    std::uint64_t good = 0;
    for (const auto& r : results)
        if (r.residue) ++good;
    if (cfg.oracle_check && *cfg.oracle_check > good) {
        err << "error: --oracle-check " << *cfg.oracle_check << " exceeds the " << good << " good primes\n";
        return kUsage;
    }
    const std::uint64_t checks = cfg.oracle_check.value_or(good);
    if (checks > 0) {
        const auto [fdatum, fz] = formula_input(datum, cfg.z);
        std::uint64_t done = 0, skipped = 0;
        for (const auto& r : results) {
            if (done + skipped == checks) break;
            if (!r.residue) continue;
            try {
                ResidueElement want = H_p_direct(fdatum, fz, r.p, r.e);
                if (!(want == *r.residue)) {
                    err << "oracle mismatch at p = " << r.p << ": expected " << want.value() << ", got "
                        << r.residue->value() << "\n";
                    return kOracleMismatch;
                }
                ++done;
            } catch (const OracleBoundExceeded&) {
                ++skipped;
            }
        }
        err << "oracle check: " << done << " primes agree";
        if (skipped) err << ", " << skipped << " beyond the oracle's range";
        err << "\n";
    }

    std::ofstream file;
    std::ostream* os = &out;
    if (!cfg.output.empty()) {
        file.open(cfg.output, std::ios::binary | std::ios::trunc);
        if (!file) {
            err << "error: cannot open " << cfg.output << "\n";
            return kRuntime;
        }
        os = &file;
    }
    if (cfg.format == OutputFormat::Csv) *os << csv_header() << "\n";
    for (const auto& r : results) *os << emit_record(r, cfg.format) << "\n";
    os->flush();

    if (cfg.phase_timings) {
        err << "phase 1 (gamma tables): " << timings.phase1 << " s\n";
        err << "phase 2 (per-prime precomputation): " << timings.phase2 << " s\n";
        err << "phase 3 (range products and assembly): " << timings.phase3 << " s\n";
    }
    return kOk;
}

int cli_main(int argc, const char* const* argv) {
    int code = 0;
    auto cfg = parse_command_line(argc, argv, std::cout, std::cerr, code);
    if (!cfg) return code;
    return run(*cfg, std::cout, std::cerr);
}

}  // namespace hgm
