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
#include "nladapt/report.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace nladapt {

const char* to_string(CheckStatus s) noexcept {
    switch (s) {
    case CheckStatus::Pass:
        return "PASS";
    case CheckStatus::Fail:
        return "FAIL";
    case CheckStatus::Inconclusive:
        return "INCONCLUSIVE";
    }
    return "?";
}

CertificateEntry CertificateEntry::from_margin(std::string name, double margin, double tolerance,
                                               Vector witness, std::optional<double> witnessTime,
                                               std::string detail) {
    CertificateEntry e;
    e.name = std::move(name);
    // NaN slack is reported as a hard failure with a finite margin.
    if (!std::isfinite(margin)) {
        e.margin = std::isnan(margin) ? -1.0 : (margin > 0 ? 1e300 : -1e300);
        if (std::isnan(margin)) {
            detail += detail.empty() ? "non-finite margin" : "; non-finite margin";
        }
    } else {
        e.margin = margin;
    }
    e.status = e.margin > 0.0 ? CheckStatus::Pass : CheckStatus::Fail;
    e.tolerance = tolerance;
    e.witness = std::move(witness);
    e.witnessTime = witnessTime;
    e.detail = std::move(detail);
    return e;
}

CertificateEntry CertificateEntry::inconclusive(std::string name, double tolerance, std::string detail) {
    CertificateEntry e;
    e.name = std::move(name);
    e.status = CheckStatus::Inconclusive;
    e.margin = -1.0;
    e.tolerance = tolerance;
    e.detail = std::move(detail);
    return e;
}

void CertificateReport::append(const CertificateReport& other) {
    entries_.insert(entries_.end(), other.entries_.begin(), other.entries_.end());
}

bool CertificateReport::all_passed() const noexcept {
    return std::all_of(entries_.begin(), entries_.end(), [](const auto& e) { return e.passed(); });
}

std::size_t CertificateReport::failures() const noexcept {
    return static_cast<std::size_t>(
        std::count_if(entries_.begin(), entries_.end(), [](const auto& e) { return !e.passed(); }));
}

const CertificateEntry* CertificateReport::find(const std::string& name) const noexcept {
    auto it = std::find_if(entries_.begin(), entries_.end(), [&](const auto& e) { return e.name == name; });
    return it == entries_.end() ? nullptr : &*it;
}

namespace {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

std::string CertificateReport::to_text() const {
    std::ostringstream os;
    for (const auto& e : entries_) {
        os << e.name << ' ' << to_string(e.status) << " margin=" << format_double(e.margin) << " witness=[";
        for (Eigen::Index i = 0; i < e.witness.size(); ++i) {
            os << (i ? "," : "") << format_double(e.witness[i]);
        }
        os << ']';
        if (e.witnessTime) {
            os << " t=" << format_double(*e.witnessTime);
        }
        os << " tol=" << format_double(e.tolerance);
        if (!e.detail.empty()) {
            os << " # " << e.detail;
        }
        os << '\n';
    }
    return os.str();
}

std::string CertificateReport::to_json() const {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& e : entries_) {
        nlohmann::json j;
        j["name"] = e.name;
        j["status"] = to_string(e.status);
        j["margin"] = e.margin;
        j["witness"] = std::vector<double>(e.witness.data(), e.witness.data() + e.witness.size());
        j["witnessTime"] = e.witnessTime ? nlohmann::json(*e.witnessTime) : nlohmann::json(nullptr);
        j["tolerance"] = e.tolerance;
        j["detail"] = e.detail;
        entries.push_back(std::move(j));
    }
    nlohmann::json doc;
    doc["allPassed"] = all_passed();
    doc["entries"] = std::move(entries);
    return doc.dump(2);
}

} // namespace nladapt
