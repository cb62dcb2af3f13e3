// SPDX-License-Identifier: Apache-2.0
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "isac/socp.hpp"

namespace isac {

namespace {

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_row(std::ostream& out, const char* tag, const VectorXd& v)
{
    out << tag;
    for (int i = 0; i < v.size(); ++i) {
        out << ' ' << fmt(v(i));
    }
    out << '\n';
}

class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {}

    // Next non-empty, non-comment line split into tag and payload.
    std::istringstream line(const std::string& expected)
    {
        std::string text;
        while (std::getline(in_, text))
       {
            ++lineno_;
            const auto first = text.find_first_not_of(" \t\r");
            if (first == std::string::npos || text[first] == '#') {
                continue;
            }
            std::istringstream ss(text);
            std::string tag;
            ss >> tag;
            if (tag != expected) {
                fail("expected '" + expected + "', found '" + tag + "'");
            }
            return ss;
        }
        fail("unexpected end of input, expected '" + expected + "'");
        return {};
    }

    VectorXd values(const std::string& tag, int count)
    {
        auto ss = line(tag);
        VectorXd v(count);
        for (int i = 0; i < count; ++i) {
            if (!(ss >> v(i)))
           {
                fail("'" + tag + "' needs " + std::to_string(count) + " values");
            }
        }
        std::string extra;
        if (ss >> extra)
       {
            fail("trailing data after '" + tag + "'");
        }
        return v;
    }

    int integer(const std::string& tag)
    {
        auto ss = line(tag);
        int v = -1;
        if (!(ss >> v) || v < 0)
       {
            fail("'" + tag + "' needs a non-negative integer");
        }
        return v;
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw std::invalid_argument("socp file line " + std::to_string(lineno_) + ": " + msg);
    }

private:
    std::istream& in_;
    int lineno_ = 0;
};

}  // namespace

void write_problem(std::ostream& out, const SocProblem& p)
{
    const int n = p.dimension();
    out << "socp 1\n";
    out << "n " << n << '\n';
    write_row(out, "objective", p.objective);
    out << "nonnegative";
    for (int j = 0; j < n; ++j) {
        const bool flag = !p.nonnegative.empty() && p.nonnegative[static_cast<std::size_t>(j)];
        out << ' ' << (flag ? 1 : 0);
    }
    out << '\n';
    out << "cones " << p.cones.size() << '\n';
    for (const auto& cone : p.cones)
   {
        out << "rows " << cone.a.rows() << '\n';
        for (int r = 0; r < cone.a.rows(); ++r) {
            write_row(out, "a", cone.a.row(r).transpose());
        }
        write_row(out, "b", cone.b);
        write_row(out, "c", cone.c);
        out << "d " << fmt(cone.d) << '\n';
    }
    out << "end\n";
}

SocProblem read_problem(std::istream& in)
{
    Reader r(in);
    if (r.integer("socp") != 1) {
        r.fail("unsupported format version");
    }
    const int n = r.integer("n");
    if (n == 0) {
        r.fail("n must be positive");
    }
    SocProblem p;
    p.objective = r.values("objective", n);
    const VectorXd mask = r.values("nonnegative", n);
    p.nonnegative.resize(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        p.nonnegative[static_cast<std::size_t>(j)] = mask(j) != 0.0;
    }
    const int k = r.integer("cones");
    for (int i = 0; i < k; ++i) {
        SocConstraint cone;
        const int rows = r.integer("rows");
        cone.a.resize(rows, n);
        for (int row = 0; row < rows; ++row) {
            cone.a.row(row) = r.values("a", n).transpose();
        }
        cone.b = r.values("b", rows);
        cone.c = r.values("c", n);
        cone.d = r.values("d", 1)(0);
        p.cones.push_back(std::move(cone));
    }
    r.line("end");
    p.validate();
    return p;
}

}  // namespace isac
