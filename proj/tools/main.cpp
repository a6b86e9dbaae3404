#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "bshmm/experiments.hpp"

namespace {

struct CliOptions {
    bshmm::SweepConfig cfg;
    std::vector<double> eps_list;
    std::string eps_range;
    std::string mode = "auto";
    std::string out = "-";
    std::string dump;
    std::string config_path;
    double q_tables = 0.24;
    int m_max = 8;
};

void add_sweep_options(CLI::App* sub, CliOptions& opt, bool simulation) {
    sub->add_option("--q", opt.cfg.q, "transition probability, in (0, 1/2)");
    sub->add_option("--eps", opt.eps_list, "explicit epsilon grid values");
    sub->add_option("--eps-range", opt.eps_range, "epsilon grid as a:b:step");
    sub->add_option("--mode", opt.mode,
                    "tie handling: auto | incommensurate | boundary:m");
    sub->add_option("--out", opt.out, "output path ('-' = stdout)");
    sub->add_option("--threads", opt.cfg.threads, "worker threads (0 = hardware)");
    if (simulation) {
        sub->add_option("--n", opt.cfg.n, "sequence length");
        sub->add_option("--trials", opt.cfg.trials, "independent realizations per point");
        sub->add_option("--seed", opt.cfg.seed, "master seed");
        sub->add_option("--dump", opt.dump,
                        "debug dump of sampled sequences, one per line (x then y)");
    }
    sub->add_option("--config", opt.config_path,
                    "flat key=value config file (q, eps, eps-range, n, trials, seed, "
                    "mode, out, threads, dump); command-line flags win");
}

// Flat key=value file.  A key is applied only when the matching flag was not
// given on the command line, so flags always win.
void apply_config_file(const CLI::App* sub, CliOptions& opt) {
    std::ifstream in(opt.config_path);
    if (!in) throw std::invalid_argument("cannot open config file: " + opt.config_path);

    const auto overridden = [&](const char* flag) {
        const CLI::Option* o = sub->get_option_no_throw(flag);
        return o != nullptr && o->count() > 0;
    };

    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        " is not key=value");
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));

        if (key == "q") {
            if (!overridden("--q")) opt.cfg.q = std::stod(value);
        } else if (key == "eps") {
            if (!overridden("--eps")) {
                opt.eps_list.clear();
                std::istringstream vs(value);
                double x;
                while (vs >> x) opt.eps_list.push_back(x);
            }
        } else if (key == "eps-range" || key == "eps_range") {
            if (!overridden("--eps-range")) opt.eps_range = value;
        } else if (key == "n") {
            if (!overridden("--n")) opt.cfg.n = std::stol(value);
        } else if (key == "trials") {
            if (!overridden("--trials")) opt.cfg.trials = std::stoi(value);
        } else if (key == "seed") {
            if (!overridden("--seed")) opt.cfg.seed = std::stoull(value);
        } else if (key == "mode") {
            if (!overridden("--mode")) opt.mode = value;
        } else if (key == "out") {
            if (!overridden("--out")) opt.out = value;
        } else if (key == "threads") {
            if (!overridden("--threads")) opt.cfg.threads = std::stoi(value);
        } else if (key == "dump") {
            if (!overridden("--dump")) opt.dump = value;
        } else {
            throw std::invalid_argument("unknown config key: " + key);
        }
    }
}

void finalize_config(const CLI::App* sub, CliOptions& opt) {
    if (!opt.config_path.empty()) apply_config_file(sub, opt);

    if (!opt.eps_range.empty()) {
        const auto range = bshmm::parse_eps_range(opt.eps_range);
        opt.eps_list.insert(opt.eps_list.end(), range.begin(), range.end());
    }
    opt.cfg.eps = opt.eps_list;

    if (opt.mode == "auto") {
        opt.cfg.mode = bshmm::DecodeModeSpec::Auto;
    } else if (opt.mode == "incommensurate") {
        opt.cfg.mode = bshmm::DecodeModeSpec::Incommensurate;
    } else if (opt.mode.rfind("boundary:", 0) == 0) {
        opt.cfg.mode = bshmm::DecodeModeSpec::Boundary;
        opt.cfg.boundary_m = std::stoi(opt.mode.substr(9));
        if (opt.cfg.boundary_m < 1)
            throw std::invalid_argument("boundary mode needs m >= 1");
    } else {
        throw std::invalid_argument("unknown mode: " + opt.mode);
    }
}

// Owns the optional file stream behind the chosen output.
class Output {
public:
    explicit Output(const std::string& path) {
        if (path != "-" && !path.empty()) {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) throw std::runtime_error("cannot open output file: " + path);
        }
    }
    std::ostream& stream() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Exact MAP structure of binary symmetric hidden Markov sequences\n"
        "via the random-field Ising chain: analytic observables (f, c, v, theta),\n"
        "degeneracy-counting Viterbi simulation, and consistency suites.\n"
        "CSV columns: " + std::string(bshmm::csv_header())};
    app.require_subcommand(1);

    CliOptions opt;

    CLI::App* analytic = app.add_subcommand(
        "analytic", "analytic observables per grid point, as CSV");
    add_sweep_options(analytic, opt, false);

    CLI::App* simulate = app.add_subcommand(
        "simulate", "Monte Carlo decode per grid point (means and standard errors), as CSV");
    add_sweep_options(simulate, opt, true);

    CLI::App* validate = app.add_subcommand(
        "validate", "run the full identity suite; nonzero exit on any failure");
    validate->add_option("--out", opt.out, "output path ('-' = stdout)");

    CLI::App* tables = app.add_subcommand(
        "tables", "boundary and mid-regime entropy tables for a given q");
    tables->add_option("--q", opt.q_tables, "transition probability");
    tables->add_option("--out", opt.out, "output path ('-' = stdout)");

    CLI::App* boundaries = app.add_subcommand(
        "boundaries", "regime boundary epsilons for a given q, as CSV");
    boundaries->add_option("--q", opt.q_tables, "transition probability");
    boundaries->add_option("--m-max", opt.m_max, "largest regime index");
    boundaries->add_option("--out", opt.out, "output path ('-' = stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (analytic->parsed()) {
            finalize_config(analytic, opt);
            Output output(opt.out);
            bshmm::run_analytic(opt.cfg, output.stream());
        } else if (simulate->parsed()) {
            finalize_config(simulate, opt);
            Output output(opt.out);
            bshmm::run_simulate(opt.cfg, output.stream(), opt.dump);
        } else if (validate->parsed()) {
            Output output(opt.out);
            if (!bshmm::run_validate(output.stream())) {
                std::cerr << "validation suite failed\n";
                return 2;
            }
        } else if (tables->parsed()) {
            Output output(opt.out);
            bshmm::run_tables(opt.q_tables, output.stream());
        } else if (boundaries->parsed()) {
            Output output(opt.out);
            bshmm::run_boundaries(opt.q_tables, opt.m_max, output.stream());
        }
    } catch (const bshmm::AmbiguityError& e) {
        std::cerr << "ambiguity error: " << e.what() << '\n';
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
