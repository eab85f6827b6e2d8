#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "crkit/corpus.hpp"
#include "crkit/poly_io.hpp"
#include "crkit/series.hpp"

namespace crkit {

using json = nlohmann::json;

/// Malformed input. Line and column are 1-based; 0 means the location is unknown.
class InputError : public std::runtime_error {
public:
    InputError(const std::string& source, std::size_t line, std::size_t column, const std::string& msg)
        : std::runtime_error(format(source, line, column, msg)), line_(line), column_(column) {}
    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    static std::string format(const std::string& source, std::size_t line, std::size_t column, const std::string& msg) {
        std::string s = source.empty() ? std::string("<input>") : source;
        if (line > 0) s += ":" + std::to_string(line) + ":" + std::to_string(column);
        return s + ": " + msg;
    }
    std::size_t line_, column_;
};

/// 64-bit FNV-1a of the raw bytes, as 16 hex digits.
inline std::string fnv1a_digest(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError(path, 0, 0, "cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

namespace detail {

/// Byte offset to (line, column).
inline std::pair<std::size_t, std::size_t> line_col(const std::string& text, std::size_t offset) {
    std::size_t line = 1, col = 1;
    for (std::size_t k = 0; k < offset && k < text.size(); ++k) {
        if (text[k] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

/// Parses the document; the parser reports the byte just past the offending token.
inline json parse_json(const std::string& text, const std::string& source) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t off = e.byte > 0 ? e.byte - 1 : 0;
        auto [l, c] = line_col(text, off);
        std::string msg = e.what();
        auto pos = msg.find("syntax error");
        throw InputError(source, l, c, pos == std::string::npos ? msg : msg.substr(pos));
    }
}

/// Locates the encoded string value inside the raw text so that diagnostics can point into it.
class Locator {
public:
    Locator(const std::string& text, std::string source) : text_(text), source_(std::move(source)) {}

    [[noreturn]] void fail_at_string(const std::string& value, std::size_t inner_column, const std::string& msg) const {
        std::string needle = json(value).dump();
        auto pos = text_.find(needle, cursor_);
        if (pos == std::string::npos) pos = text_.find(needle);
        if (pos == std::string::npos) throw InputError(source_, 0, 0, msg);
        auto [l, c] = line_col(text_, pos + inner_column);
        throw InputError(source_, l, c, msg);
    }
    [[noreturn]] void fail_at_key(const std::string& key, const std::string& msg) const {
        auto pos = text_.find("\"" + key + "\"");
        if (pos == std::string::npos) throw InputError(source_, 0, 0, msg);
        auto [l, c] = line_col(text_, pos);
        throw InputError(source_, l, c, msg);
    }
    [[noreturn]] void fail(const std::string& msg) const { throw InputError(source_, 0, 0, msg); }

    /// Subsequent string searches start after the first occurrence of this key.
    void advance_to_key(const std::string& key) {
        auto pos = text_.find("\"" + key + "\"");
        if (pos != std::string::npos) cursor_ = pos;
    }

private:
    const std::string& text_;
    std::string source_;
    std::size_t cursor_ = 0;
};

inline Rational parse_rational_text(const std::string& s) {
    Rational q;
    if (q.set_str(s, 10) != 0) throw std::invalid_argument("not a rational number: \"" + s + "\"");
    q.canonicalize();
    return q;
}

/// Integers, or "p/q" strings. Non-integral floating values are rejected so inputs stay exact.
inline Rational rational_of(const json& v) {
    if (v.is_number_integer()) return Rational(mpz_class(v.dump(), 10));
    if (v.is_number_float()) {
        double d = v.get<double>();
        if (d != static_cast<double>(static_cast<long long>(d)))
            throw std::invalid_argument("non-integral number " + v.dump() + "; write it as a \"p/q\" string");
        return Rational(mpz_class(static_cast<long>(d)));
    }
    if (v.is_string()) return parse_rational_text(v.get<std::string>());
    throw std::invalid_argument("expected a number or a \"p/q\" string, got " + v.dump());
}

inline GaussRat complex_of(const json& v) {
    if (!v.is_array() || v.size() != 2) throw std::invalid_argument("expected [re, im], got " + v.dump());
    return GaussRat(rational_of(v[0]), rational_of(v[1]));
}

inline int int_field(const json& doc, const char* key, Locator& loc, bool required = true, int fallback = 0) {
    if (!doc.contains(key)) {
        if (required) loc.fail(std::string("missing field \"") + key + "\"");
        return fallback;
    }
    const auto& v = doc[key];
    if (!v.is_number_integer()) loc.fail_at_key(key, std::string("field \"") + key + "\" must be an integer");
    return v.get<int>();
}

inline json rational_json(const Rational& q) {
    if (q.get_den() == 1 && q.get_num().fits_slong_p()) return q.get_num().get_si();
    return q.get_str();
}

}  // namespace detail

inline json to_json(const GaussRat& x) { return json::array({detail::rational_json(x.re()), detail::rational_json(x.im())}); }

inline json to_json(const PointC& p) {
    json a = json::array();
    for (const auto& x : p) a.push_back(to_json(x));
    return a;
}

inline PointC point_from_json(const json& v) {
    if (!v.is_array()) throw std::invalid_argument("a point is a list of [re, im] pairs");
    PointC p;
    for (const auto& x : v) p.push_back(detail::complex_of(x));
    return p;
}

/// Manifold description:
/// {"name", "n", "form": "implicit"|"graph", "m"?, "d"?, "equations": [poly...], "base_point"?: [[re, im]...]}.
/// Graph equations are the right-hand sides Q_l of zb_{m+l} = Q_l in z1..zn, zb1..zbm.
inline AnyManifold manifold_from_json(const std::string& text, const std::string& source = "") {
    json doc = detail::parse_json(text, source);
    detail::Locator loc(text, source);
    if (!doc.is_object()) loc.fail("manifold description must be a JSON object");
    std::string name = doc.value("name", std::string());
    int n = detail::int_field(doc, "n", loc);
    if (n < 1) loc.fail_at_key("n", "n must be positive");
    if (!doc.contains("form") || !doc["form"].is_string()) loc.fail("missing string field \"form\"");
    std::string form = doc["form"].get<std::string>();
    if (form != "implicit" && form != "graph") loc.fail_at_key("form", "form must be \"implicit\" or \"graph\"");
    if (!doc.contains("equations") || !doc["equations"].is_array() || doc["equations"].empty())
        loc.fail("\"equations\" must be a non-empty list of polynomial strings");

    Ctx ctx = VarContext::paired(n);
    loc.advance_to_key("equations");
    std::vector<Poly> eqs;
    for (const auto& e : doc["equations"]) {
        if (!e.is_string()) loc.fail_at_key("equations", "every equation must be a string");
        std::string s = e.get<std::string>();
        try {
            eqs.push_back(parse_poly(s, ctx));
        } catch (const ParseError& err) {
            std::string msg = err.what();
            loc.fail_at_string(s, err.column(), "equation \"" + s + "\": " + msg);
        }
    }

    std::optional<PointC> base;
    if (doc.contains("base_point")) {
        try {
            base = point_from_json(doc["base_point"]);
        } catch (const std::invalid_argument& err) {
            loc.fail_at_key("base_point", err.what());
        }
        if (static_cast<int>(base->size()) != n) loc.fail_at_key("base_point", "base_point needs n coordinates");
    }

    try {
        if (form == "graph") {
            int d = doc.contains("d") ? detail::int_field(doc, "d", loc) : static_cast<int>(eqs.size());
            int m = doc.contains("m") ? detail::int_field(doc, "m", loc) : n - d;
            if (m + d != n) loc.fail_at_key("m", "graph form needs m + d = n");
            GraphManifold G(name, m, d, eqs);
            if (base) {
                PointC pc = complexified_point(*base);
                for (int l = 0; l < d; ++l)
                    if (!(Poly::var(G.ctx, G.xi(l)) - G.Q[l]).evaluate(pc).is_zero())
                        loc.fail_at_key("base_point", "base_point does not lie on the manifold");
                G.base_point = *base;
            }
            return G;
        }
        auto M = make_implicit(name, n, eqs, base);
        if (base && !on_manifold(M, *base)) loc.fail_at_key("base_point", "base_point does not lie on the manifold");
        return M;
    } catch (const InputError&) {
        throw;
    } catch (const std::invalid_argument& err) {
        loc.fail(err.what());
    }
}

inline AnyManifold load_manifold(const std::string& path) { return manifold_from_json(read_file(path), path); }

/// Manifold description that reparses to an equal manifold.
inline json manifold_to_json(const AnyManifold& any) {
    json doc;
    if (auto g = std::get_if<GraphManifold>(&any)) {
        doc["name"] = g->name;
        doc["n"] = g->n();
        doc["form"] = "graph";
        doc["m"] = g->m;
        doc["d"] = g->d;
        for (const auto& q : g->Q) doc["equations"].push_back(to_string(q));
        doc["base_point"] = to_json(g->base_point);
    } else {
        const auto& M = std::get<ImplicitManifold>(any);
        doc["name"] = M.name;
        doc["n"] = M.n;
        doc["form"] = "implicit";
        for (const auto& q : M.gens) doc["equations"].push_back(to_string(q));
        if (M.base_point) doc["base_point"] = to_json(*M.base_point);
    }
    return doc;
}

/// Series map description:
/// {"n_in", "n_out", "order", "components": [...]} where a component is either a term list
/// [[exponent-vector, [re, im]], ...] or an expression string (including the builtin generators).
inline SeriesMap series_from_json(const std::string& text, const std::string& source = "") {
    json doc = detail::parse_json(text, source);
    detail::Locator loc(text, source);
    if (!doc.is_object()) loc.fail("series description must be a JSON object");
    SeriesMap f;
    f.n_in = detail::int_field(doc, "n_in", loc);
    if (f.n_in < 1) loc.fail_at_key("n_in", "n_in must be positive");
    f.order = detail::int_field(doc, "order", loc);
    if (f.order < 1) loc.fail_at_key("order", "order must be positive");
    if (!doc.contains("components") || !doc["components"].is_array() || doc["components"].empty())
        loc.fail("\"components\" must be a non-empty list");
    loc.advance_to_key("components");
    Ctx ctx = f.context();
    for (const auto& c : doc["components"]) {
        if (c.is_string()) {
            std::string s = c.get<std::string>();
            try {
                f.components.push_back(parse_series(s, f.n_in));
            } catch (const ParseError& err) {
                std::size_t shift = s.rfind("polynomial:", 0) == 0 ? 11 : 0;
                loc.fail_at_string(s, err.column() + shift, "component \"" + s + "\": " + err.what());
            } catch (const std::invalid_argument& err) {
                std::string msg = err.what();
                std::size_t col = 0;
                auto k = msg.find("column ");
                if (k != std::string::npos) col = std::stoul(msg.substr(k + 7)) - 1;
                loc.fail_at_string(s, col + 1, "component \"" + s + "\": " + msg);
            }
        } else if (c.is_array()) {
            Poly p(ctx);
            for (const auto& term : c) {
                if (!term.is_array() || term.size() != 2 || !term[0].is_array())
                    loc.fail_at_key("components", "a term is [exponent-vector, [re, im]]");
                if (static_cast<int>(term[0].size()) != f.n_in)
                    loc.fail_at_key("components", "exponent vector length must equal n_in");
                Exponent e;
                for (const auto& x : term[0]) {
                    if (!x.is_number_integer() || x.get<long>() < 0)
                        loc.fail_at_key("components", "exponents must be non-negative integers");
                    e.push_back(static_cast<Exponent::value_type>(x.get<long>()));
                }
                try {
                    p.add_term(e, detail::complex_of(term[1]));
                } catch (const std::invalid_argument& err) {
                    loc.fail_at_key("components", err.what());
                }
            }
            // an explicit term list is exact through the declared order
            f.components.push_back(SeriesExpr::raw_series(p, f.order));
        } else {
            loc.fail_at_key("components", "a component is a term list or an expression string");
        }
    }
    if (doc.contains("n_out") && detail::int_field(doc, "n_out", loc) != f.n_out())
        loc.fail_at_key("n_out", "n_out does not match the number of components");
    return f;
}

inline SeriesMap load_series(const std::string& path) { return series_from_json(read_file(path), path); }

inline json series_to_json(const SeriesMap& f) {
    json doc;
    doc["n_in"] = f.n_in;
    doc["n_out"] = f.n_out();
    doc["order"] = f.order;
    doc["components"] = json::array();
    for (std::size_t k = 0; k < f.components.size(); ++k) {
        const auto& c = f.components[k];
        if (c->max_order() == std::numeric_limits<int>::max()) {
            doc["components"].push_back(c->str());
            continue;
        }
        // components built from explicit coefficients are written back as term lists
        json terms = json::array();
        Poly p = f.exact(k, std::min(f.order, c->max_order()));
        for (const auto& [e, coef] : p.terms()) terms.push_back(json::array({json(e), to_json(coef)}));
        doc["components"].push_back(terms);
    }
    return doc;
}

}  // namespace crkit
