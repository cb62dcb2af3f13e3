// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <initializer_list>
#include <ostream>
#include <string>

namespace isac {

/// Shortest round-trip-safe text for a double; "nan"/"inf" for non-finite.
std::string csv_number(double v);

/// Minimal comma-separated writer; fields are never quoted.
class CsvWriter {
public:
    explicit CsvWriter(std::ostream& out) : out_(out) {}

    void header(std::initializer_list<const char*> names);

    CsvWriter& field(const std::string& text);
    CsvWriter& field(const char* text) { return field(std::string(text)); }
    CsvWriter& field(double v) { return field(csv_number(v)); }
    CsvWriter& field(int v) { return field(std::to_string(v)); }
    CsvWriter& field(long long v) { return field(std::to_string(v)); }
    CsvWriter& field(unsigned long long v) { return field(std::to_string(v)); }
    void end_row();

private:
    std::ostream& out_;
    bool first_ = true;
};

}  // namespace isac
