#include <iostream>

#include "fanstate_app.hpp"

int main(int argc, char** argv) {
    return fanstate::cli::main_entry(argc, argv, std::cout, std::cerr);
}
