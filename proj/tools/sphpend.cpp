#include <sphpend/cli.hpp>

int main(int argc, char** argv)
{
    return sphpend::cli::run_cli(argc, argv);
}
