// SPDX-License-Identifier: Apache-2.0
#include "isac/csv.hpp"

#include <cmath>
#include <cstdio>

namespace isac {

std::string csv_number(double v)
{
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

void CsvWriter::header(std::initializer_list<const char*> names)
{
    for (const char* n : names) {
        field(n);
    }
    end_row();
}

CsvWriter& CsvWriter::field(const std::string& text)
{
    if (!first_) {
        out_ << ',';
    }
    out_ << text;
    first_ = false;
    return *this;
}

void CsvWriter::end_row()
{
    out_ << '\n';
    first_ = true;
}

}  // namespace isac
