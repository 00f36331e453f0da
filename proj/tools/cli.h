#ifndef DECOLE_TOOLS_CLI_H_
#define DECOLE_TOOLS_CLI_H_

namespace decole {

// Entry point for `decole <synth|prune|eval|experiment> ...`. Returns the
// process exit status: 0 success, 1 usage, 2 data, 3 numerical failure.
int RunCli(int argc, char** argv);

}  // namespace decole

#endif  // DECOLE_TOOLS_CLI_H_
