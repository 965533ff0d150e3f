#include "drtrack/config.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <variant>

#include "drtrack/error.hpp"

namespace drtrack {

namespace {

using Member = std::variant<double Config::*, int Config::*, bool Config::*, std::string Config::*>;

struct Field {
    std::string_view name;
    Member member;
};

constexpr std::array kFields = {
    Field{"theta", &Config::theta},
    Field{"gamma0", &Config::gamma0},
    Field{"beta", &Config::beta},
    Field{"gamma_max", &Config::gamma_max},
    Field{"admm_iterations", &Config::admm_iterations},
    Field{"w_min", &Config::w_min},
    Field{"w_amp", &Config::w_amp},
    Field{"mu", &Config::mu},
    Field{"num_distractors", &Config::num_distractors},
    Field{"repression", &Config::repression},
    Field{"sigma_factor", &Config::sigma_factor},
    Field{"cell_size", &Config::cell_size},
    Field{"search_factor", &Config::search_factor},
    Field{"use_gray", &Config::use_gray},
    Field{"use_hog", &Config::use_hog},
    Field{"use_cn", &Config::use_cn},
    Field{"cn_table", &Config::cn_table},
    Field{"num_scales", &Config::num_scales},
    Field{"scale_step", &Config::scale_step},
    Field{"scale_learning_rate", &Config::scale_learning_rate},
    Field{"scale_sigma_factor", &Config::scale_sigma_factor},
    Field{"scale_lambda", &Config::scale_lambda},
    Field{"scale_model_max_area", &Config::scale_model_max_area},
    Field{"no_dr", &Config::no_dr},
    Field{"no_ma", &Config::no_ma},
    Field{"subpixel", &Config::subpixel},
    Field{"precision_inclusive", &Config::precision_inclusive},
    Field{"success_strict", &Config::success_strict},
    Field{"image_dir", &Config::image_dir},
    Field{"groundtruth_file", &Config::groundtruth_file},
};

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view expected) {
    throw DataError("config key '" + std::string(key) + "': cannot parse '" + std::string(value) + "' as " +
                    std::string(expected));
}

}  // namespace

void Config::set(std::string_view key, std::string_view value) {
    key = trim(key);
    value = trim(value);
    for (const Field& f : kFields) {
        if (f.name != key)
            continue;
        std::visit(
            [&](auto member) {
                using T = std::remove_reference_t<decltype(this->*member)>;
                if constexpr (std::is_same_v<T, double>) {
                    double v = 0.0;
                    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
                    if (ec != std::errc{} || ptr != value.data() + value.size())
                        bad_value(key, value, "a number");
                    this->*member = v;
                } else if constexpr (std::is_same_v<T, int>) {
                    int v = 0;
                    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
                    if (ec != std::errc{} || ptr != value.data() + value.size())
                        bad_value(key, value, "an integer");
                    this->*member = v;
                } else if constexpr (std::is_same_v<T, bool>) {
                    if (value == "true" || value == "1" || value == "yes" || value == "on")
                        this->*member = true;
                    else if (value == "false" || value == "0" || value == "no" || value == "off")
                        this->*member = false;
                    else
                        bad_value(key, value, "a boolean");
                } else {
                    this->*member = std::string(value);
                }
            },
            f.member);
        return;
    }
    throw DataError("unknown config key '" + std::string(key) + "'");
}

void Config::validate() const {
    auto fail = [](std::string_view key, std::string_view why) {
        throw DataError("config key '" + std::string(key) + "' " + std::string(why));
    };
    admm().validate();
    if (!(w_min > 0.0))
        fail("w_min", "must be > 0");
    if (!(w_amp >= 0.0))
        fail("w_amp", "must be >= 0");
    if (!(mu >= 0.0 && mu <= 1.0))
        fail("mu", "must lie in [0, 1]");
    if (repression != "additive" && repression != "product")
        fail("repression", "must be 'additive' or 'product'");
    if (num_distractors < 0)
        fail("num_distractors", "must be >= 0");
    if (!(sigma_factor > 0.0))
        fail("sigma_factor", "must be > 0");
    if (cell_size < 1)
        fail("cell_size", "must be >= 1");
    if (!(search_factor >= 1.0))
        fail("search_factor", "must be >= 1");
    if (!use_gray && !use_hog && !use_cn)
        fail("use_gray/use_hog/use_cn", "must enable at least one feature");
    if (num_scales < 1 || num_scales % 2 == 0)
        fail("num_scales", "must be a positive odd number");
    if (!(scale_step > 1.0))
        fail("scale_step", "must be > 1");
    if (!(scale_learning_rate > 0.0 && scale_learning_rate <= 1.0))
        fail("scale_learning_rate", "must lie in (0, 1]");
    if (!(scale_sigma_factor > 0.0))
        fail("scale_sigma_factor", "must be > 0");
    if (!(scale_lambda >= 0.0))
        fail("scale_lambda", "must be >= 0");
    if (!(scale_model_max_area >= 64.0))
        fail("scale_model_max_area", "must be >= 64");
    if (image_dir.empty())
        fail("image_dir", "must not be empty");
    if (groundtruth_file.empty())
        fail("groundtruth_file", "must not be empty");
}

std::string Config::serialize() const {
    std::ostringstream out;
    for (const Field& f : kFields) {
        out << f.name << " = ";
        std::visit(
            [&](auto member) {
                const auto& v = this->*member;
                using T = std::remove_cvref_t<decltype(v)>;
                if constexpr (std::is_same_v<T, double>)
                    out << format_double(v);
                else if constexpr (std::is_same_v<T, bool>)
                    out << (v ? "true" : "false");
                else
                    out << v;
            },
            f.member);
        out << '\n';
    }
    return out.str();
}

Config Config::parse(std::string_view text, std::string_view origin) {
    Config cfg;
    int line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw DataError(std::string(origin) + ":" + std::to_string(line_no) + ": expected 'key = value'");
        try {
            cfg.set(line.substr(0, eq), line.substr(eq + 1));
        } catch (const DataError& e) {
            throw DataError(std::string(origin) + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    cfg.validate();
    return cfg;
}

Config Config::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open config file: " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path.string());
}

}  // namespace drtrack
