#include <iostream>

#include "crw/verify.hpp"

int main() {
    const auto report = crw::verify_suite(crw::VerifyLevel::full, &std::cout);
    int failed = 0;
    for (const auto& r : report.results) failed += r.status != crw::Status::pass;
    std::cout << (report.results.size() - failed) << "/" << report.results.size() << " criteria passed\n";
    return failed == 0 ? 0 : 1;
}
