#include <iostream>

#include "nbv/app.hpp"

int main(int argc, char** argv) { return nbv::app::run(argc, argv, std::cout, std::cerr); }
