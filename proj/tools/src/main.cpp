#include "hdc_cli/app.hpp"

int main(int argc, char** argv) { return hdc::cli::run(argc, argv); }
