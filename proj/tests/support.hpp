#pragma once

#include <functional>
#include <sstream>
#include <string>

#include <doctest.h>

#include "rypanel/errors.hpp"
#include "rypanel/panel_data.hpp"

namespace rypanel::test {

/// Runs fn and checks that it throws Error with the expected code.
inline void expect_error(ErrorCode expected, const std::function<void()>& fn) {
    bool threw = false;
    try {
        fn();
    } catch (const Error& e) {
        threw = true;
        CHECK_MESSAGE(e.code() == expected, "expected ", error_code_name(expected), " got ", e.what());
    }
    CHECK_MESSAGE(threw, "expected error ", error_code_name(expected), ", nothing thrown");
}

inline PanelDataset panel_from_csv(const std::string& csv) {
    std::istringstream in(csv);
    return load_panel(in);
}

} // namespace rypanel::test
