/*
 Copyright 2026 The nladapt Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
#ifndef NLADAPT_REPORT_HPP
#define NLADAPT_REPORT_HPP

#include "nladapt/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace nladapt {

enum class CheckStatus { Pass, Fail, Inconclusive };

const char* to_string(CheckStatus s) noexcept;

/**
 * One verified property.
 *
 * `margin` is signed slack: a check passes iff margin > 0. Failing checks
 * carry the (negative or zero) worst slack; inconclusive checks carry -1.
 * `witness` is the state or sample where the worst slack was observed.
 */
struct CertificateEntry {
    std::string name;
    CheckStatus status = CheckStatus::Inconclusive;
    double margin = -1.0;
    Vector witness;
    std::optional<double> witnessTime;
    double tolerance = 0.0;
    std::string detail;

    bool passed() const noexcept { return status == CheckStatus::Pass; }

    /// Entry whose status follows the sign of `margin`.
    static CertificateEntry from_margin(std::string name, double margin, double tolerance,
                                        Vector witness = {},
                                        std::optional<double> witnessTime = std::nullopt,
                                        std::string detail = {});

    static CertificateEntry inconclusive(std::string name, double tolerance, std::string detail);
};

class CertificateReport {
public:
    void add(CertificateEntry e) { entries_.push_back(std::move(e)); }
    void append(const CertificateReport& other);

    const std::vector<CertificateEntry>& entries() const noexcept { return entries_; }
    bool all_passed() const noexcept;
    std::size_t failures() const noexcept;

    /// Looks an entry up by exact name; nullptr if absent.
    const CertificateEntry* find(const std::string& name) const noexcept;

    /// One line per entry: `name status margin witness`.
    std::string to_text() const;
    std::string to_json() const;

private:
    std::vector<CertificateEntry> entries_;
};

} // namespace nladapt

#endif // NLADAPT_REPORT_HPP
