#include "table2_scenarios.hpp"

#include "cwescout/util.hpp"

#include <filesystem>

namespace cwescout::testing {

namespace {

CandidateCwe cand(std::string id, std::string title, double prob, std::string justification) {
    return {std::move(id), std::move(title), prob, std::move(justification)};
}

DecisionSpec confirm(std::string id, std::string title, std::string why) {
    return {std::move(id), std::move(title), true, std::move(why)};
}

DecisionSpec reject(std::string id, std::string title, std::string why) {
    return {std::move(id), std::move(title), false, std::move(why)};
}

std::vector<Table2Scenario> build_scenarios() {
    std::vector<Table2Scenario> all;

    // -----------------------------------------------------------------
    // Set 1: the apparent weakness is mitigated by the wider program.
    // -----------------------------------------------------------------
    {
        Table2Scenario s;
        s.id = "cwe120";
        s.truth = {"CWE-120"};
        s.tag = eval::SetTag::ContextDependent;
        s.entry_function = "internal_copy";
        s.function_text =
            R"(void internal_copy(char *dst, const char *src, unsigned long n)
{
    memcpy(dst, src, n);
    dst[n] = '\0';
}
)";
        s.project_files = {
            {"main.c",
             R"(#include <string.h>
#include <stdio.h>

#define MSG_CAP 128

extern void internal_copy(char *dst, const char *src, unsigned long n);

static int check_size(unsigned long n)
{
    return n < MSG_CAP;
}

int store_message(const char *src, unsigned long n)
{
    char slot[MSG_CAP];
    if (!check_size(n))
        return -1;
    internal_copy(slot, src, n);
    return publish(slot);
}
)"},
            {"publish.c",
             R"(#include <stdio.h>

int publish(const char *slot)
{
    fputs(slot, stdout);
    fputc('\n', stdout);
    return 0;
}
)"},
        };
        s.lister_first = {
            cand("CWE-120", "Buffer Copy without Checking Size of Input", 0.9,
                 "memcpy copies n bytes into dst without any bound check on n"),
            cand("CWE-787", "Out-of-bounds Write", 0.75,
                 "dst[n] writes one past the copied region when n equals the buffer size"),
            cand("CWE-476", "NULL Pointer Dereference", 0.7,
                 "dst and src are dereferenced without null checks"),
            cand("CWE-20", "Improper Input Validation", 0.65,
                 "n is used without validation inside the function"),
            cand("CWE-126", "Buffer Over-read", 0.5,
                 "src may be shorter than n bytes"),
            cand("CWE-119", "Improper Restriction of Operations within the Bounds of a Memory Buffer",
                 0.45, "no relation between n and the capacity of dst is established"),
            cand("CWE-190", "Integer Overflow or Wraparound", 0.3,
                 "n is unsigned and attacker-influenced arithmetic could wrap"),
        };
        s.lister_final = s.lister_first;
        s.raw_questions = {
            {"I want the calls to the function internal_copy",
             "the call sites show whether the size is checked before the copy"},
            {"Where is the size argument validated before internal_copy is invoked",
             "a validation helper outside the function would mitigate the overflow"},
        };
        s.answers = {
            "internal_copy is called only from store_message in main.c. The caller rejects any "
            "size of MSG_CAP or more via check_size before the copy, so the size was validated "
            "before calling the function.",
            "The size n is validated by check_size(n), which requires n < MSG_CAP, immediately "
            "before the only call to internal_copy. The destination slot has exactly MSG_CAP "
            "bytes, leaving room for the terminator.",
        };
        s.decisions = {
            reject("CWE-120", "Buffer Copy without Checking Size of Input",
                   "the size was validated before calling the function"),
            confirm("CWE-787", "Out-of-bounds Write",
                    "dst[n] still writes at index n; the check n < MSG_CAP leaves this as the "
                    "last valid byte only by coincidence of the call site"),
            reject("CWE-476", "NULL Pointer Dereference",
                   "the only caller passes a stack array and a checked source"),
            confirm("CWE-20", "Improper Input Validation",
                    "the function itself performs no validation and relies on every caller"),
            reject("CWE-126", "Buffer Over-read", "the caller bounds n below MSG_CAP"),
            reject("CWE-119",
                   "Improper Restriction of Operations within the Bounds of a Memory Buffer",
                   "capacity is enforced at the call site"),
            reject("CWE-190", "Integer Overflow or Wraparound",
                   "no arithmetic on n occurs before the bound check"),
        };
        s.expected = {s.id, 0, 2, 5, 0, 0};
        all.push_back(std::move(s));
    }
    {
        Table2Scenario s;
        s.id = "cwe134";
        s.truth = {"CWE-134"};
        s.tag = eval::SetTag::ContextDependent;
        s.entry_function = "log_message";
        s.function_text =
            R"(void log_message(const char *msg)
{
    printf(msg);
    fflush(stdout);
}
)";
        s.project_files = {
            {"main.c",
             R"(#include <stdio.h>

extern void log_message(const char *msg);

void report_startup(void)
{
    log_message("service started\n");
}

void report_shutdown(int code)
{
    if (code == 0)
        log_message("clean shutdown\n");
    else
        log_message("abnormal shutdown\n");
}
)"},
            {"timer.c",
             R"(extern void log_message(const char *msg);

void on_timer_tick(void)
{
    log_message("tick\n");
}
)"},
        };
        s.lister_first = {
            cand("CWE-134", "Use of Externally-Controlled Format String", 0.9,
                 "printf(msg) passes msg directly as the format string"),
            cand("CWE-20", "Improper Input Validation", 0.7,
                 "msg is not validated before use"),
            cand("CWE-200", "Exposure of Sensitive Information to an Unauthorized Actor", 0.65,
                 "%p or %x specifiers in msg could leak stack contents"),
            cand("CWE-126", "Buffer Over-read", 0.55,
                 "a non-terminated msg would be read past its end"),
            cand("CWE-121", "Stack-based Buffer Overflow", 0.5,
                 "%n in the format string can write to the stack"),
            cand("CWE-787", "Out-of-bounds Write", 0.45,
                 "%n in a crafted format string writes through a stack pointer"),
            cand("CWE-676", "Use of Potentially Dangerous Function", 0.35,
                 "printf with a variable format string is a dangerous pattern"),
            cand("CWE-252", "Unchecked Return Value", 0.2,
                 "printf and fflush results are ignored"),
        };
        s.lister_final = s.lister_first;
        s.raw_questions = {
            {"I want the calls to the function log_message",
             "whether msg is ever user-controlled decides the format-string issue"},
            {"Which values are passed as the msg argument to log_message",
             "static literals cannot carry conversion specifiers chosen by an attacker"},
        };
        s.answers = {
            "log_message is called from report_startup, report_shutdown and on_timer_tick. Every "
            "call passes a string literal; the call to the vulnerable function does not leave a "
            "way to the users to control the value of msg.",
            "All msg arguments are fixed literals: \"service started\\n\", \"clean shutdown\\n\", "
            "\"abnormal shutdown\\n\" and \"tick\\n\". The message is statically given to the "
            "vulnerable function in every caller.",
        };
        s.decisions = {
            reject("CWE-134", "Use of Externally-Controlled Format String",
                   "every caller passes a static literal; users cannot control msg"),
            confirm("CWE-20", "Improper Input Validation",
                    "the function still accepts any pointer and performs no checking itself"),
            reject("CWE-200", "Exposure of Sensitive Information to an Unauthorized Actor",
                   "no caller passes attacker-chosen specifiers"),
            reject("CWE-126", "Buffer Over-read", "all literals are properly terminated"),
            reject("CWE-121", "Stack-based Buffer Overflow", "no %n reachable with static messages"),
            reject("CWE-787", "Out-of-bounds Write", "no %n reachable with static messages"),
            reject("CWE-676", "Use of Potentially Dangerous Function",
                   "the pattern is risky but unreachable with the given callers"),
            reject("CWE-252", "Unchecked Return Value", "ignored stdio results have no security effect here"),
        };
        s.expected = {s.id, 0, 1, 7, 0, 0};
        all.push_back(std::move(s));
    }
    {
        Table2Scenario s;
        s.id = "cwe78";
        s.truth = {"CWE-78"};
        s.tag = eval::SetTag::ContextDependent;
        s.entry_function = "run_command";
        s.function_text =
            R"(int run_command(const char *cmd)
{
    return system(cmd);
}
)";
        s.project_files = {
            {"main.c",
             R"(#include <stdio.h>
#include <string.h>

extern int run_command(const char *cmd);

int handle_menu_choice(int choice)
{
    if (choice == 1)
        return run_command("ls -1");
    if (choice == 2)
        return run_command("date");
    return run_command("echo Unknown command");
}
)"},
            {"menu.c",
             R"(#include <stdio.h>

int read_menu_choice(void)
{
    int choice = 0;
    if (scanf("%d", &choice) != 1)
        return 0;
    return choice;
}
)"},
        };
        s.lister_first = {
            cand("CWE-78", "Improper Neutralization of Special Elements used in an OS Command", 0.95,
                 "system(cmd) executes the parameter verbatim through the shell"),
            cand("CWE-88", "Argument Injection or Modification", 0.8,
                 "attacker-controlled cmd could smuggle extra arguments"),
            cand("CWE-20", "Improper Input Validation", 0.7,
                 "cmd is not validated before reaching system"),
            cand("CWE-77", "Improper Neutralization of Special Elements used in a Command", 0.6,
                 "shell metacharacters in cmd are not neutralized"),
            cand("CWE-73", "External Control of File Name or Path", 0.5,
                 "cmd may reference attacker-chosen paths"),
            cand("CWE-426", "Untrusted Search Path", 0.4,
                 "system uses PATH to resolve the binary"),
            cand("CWE-807", "Reliance on Untrusted Inputs in a Security Decision", 0.3,
                 "callers may base decisions on the unchecked parameter"),
            cand("CWE-252", "Unchecked Return Value", 0.2,
                 "some call sites may ignore the result of system"),
        };
        s.lister_final = s.lister_first;
        // two duplicated questions exercise the dedup-then-retrieve-once rule
        s.raw_questions = {
            {"I want the calls to the function run_command",
             "the call sites show whether cmd can be user-controlled"},
            {"I want the calls to the function run_command",
             "duplicate request issued for CWE-88 as well"},
            {"Which command strings are passed to run_command",
             "static command strings cannot be injected into"},
        };
        s.answers = {
            "run_command is called only from handle_menu_choice. The vulnerable function is "
            "called with static commands (ls -1, date, or echo Unknown command); the menu choice "
            "selects between fixed literals.",
            "The command strings are the literals \"ls -1\", \"date\" and \"echo Unknown "
            "command\". No user-provided bytes ever reach the cmd parameter.",
        };
        s.decisions = {
            reject("CWE-78", "Improper Neutralization of Special Elements used in an OS Command",
                   "the vulnerable function is called with static commands only"),
            reject("CWE-88", "Argument Injection or Modification",
                   "no caller forwards user input into cmd"),
            reject("CWE-20", "Improper Input Validation",
                   "the only inputs are fixed literals selected by a menu index"),
            reject("CWE-77", "Improper Neutralization of Special Elements used in a Command",
                   "no dynamic command construction exists in the program"),
            reject("CWE-73", "External Control of File Name or Path",
                   "paths inside the commands are fixed"),
            confirm("CWE-426", "Untrusted Search Path",
                    "system still resolves ls, date and echo through the inherited PATH"),
            reject("CWE-807", "Reliance on Untrusted Inputs in a Security Decision",
                   "the menu index only selects among safe constants"),
            reject("CWE-252", "Unchecked Return Value",
                   "handle_menu_choice propagates the return value"),
        };
        s.expected = {s.id, 0, 1, 7, 0, 0};
        all.push_back(std::move(s));
    }
    {
        Table2Scenario s;
        s.id = "cwe22";
        s.truth = {"CWE-22"};
        s.tag = eval::SetTag::ContextDependent;
        s.entry_function = "open_data_file";
        s.function_text =
            R"(FILE *open_data_file(const char *name)
{
    char path[256];
    snprintf(path, sizeof(path), "%s/%s", SAFE_DIR, name);
    return fopen(path, "r");
}
)";
        s.project_files = {
            {"main.c",
             R"(#include <stdio.h>
#include <string.h>

extern FILE *open_data_file(const char *name);
extern void strip_traversal(char *name);

int show_file(const char *requested)
{
    char name[128];
    strncpy(name, requested, sizeof(name) - 1);
    name[sizeof(name) - 1] = '\0';
    strip_traversal(name);
    FILE *f = open_data_file(name);
    if (!f)
        return -1;
    dump(f);
    fclose(f);
    return 0;
}
)"},
            {"sanitize.c",
             R"(#include <string.h>

void strip_traversal(char *name)
{
    char *hit;
    while ((hit = strstr(name, "..")) != 0)
        memmove(hit, hit + 2, strlen(hit + 2) + 1);
    while ((hit = strchr(name, '/')) != 0)
        memmove(hit, hit + 1, strlen(hit + 1) + 1);
}
)"},
        };
        s.lister_first = {
            cand("CWE-22", "Improper Limitation of a Pathname to a Restricted Directory", 0.9,
                 "name is concatenated into path without traversal filtering"),
            cand("CWE-73", "External Control of File Name or Path", 0.8,
                 "the opened path is derived from the caller-supplied name"),
            cand("CWE-20", "Improper Input Validation", 0.7,
                 "name is not validated inside the function"),
            cand("CWE-59", "Improper Link Resolution Before File Access", 0.6,
                 "a symlink inside SAFE_DIR could escape the directory"),
            cand("CWE-36", "Absolute Path Traversal", 0.5,
                 "an absolute name would still be prefixed but may confuse later handling"),
            cand("CWE-23", "Relative Path Traversal", 0.45,
                 "../ sequences in name walk out of SAFE_DIR"),
            cand("CWE-367", "Time-of-check Time-of-use Race Condition", 0.4,
                 "the file may change between construction and fopen"),
            cand("CWE-252", "Unchecked Return Value", 0.3,
                 "snprintf truncation is not checked"),
            cand("CWE-476", "NULL Pointer Dereference", 0.2,
                 "callers may pass a null name"),
        };
        s.lister_final = s.lister_first;
        s.raw_questions = {
            {"I want the calls to the function open_data_file",
             "the callers may sanitize the name before the call"},
            {"Is the name parameter sanitized against path traversal before open_data_file",
             "external sanitization would remove ../ sequences"},
        };
        s.answers = {
            "open_data_file is reached only through show_file in main.c, which copies the "
            "requested name and calls strip_traversal on it before the open. Before calling the "
            "vulnerable function, the parameter is sanitized by a third function that removes any "
            "path traversal sequences like '..'.",
            "strip_traversal removes every \"..\" occurrence and every '/' from the name, so the "
            "constructed path cannot leave SAFE_DIR.",
        };
        s.decisions = {
            reject("CWE-22", "Improper Limitation of a Pathname to a Restricted Directory",
                   "the parameter is sanitized by strip_traversal before the call"),
            reject("CWE-73", "External Control of File Name or Path",
                   "sanitization leaves only a bare filename under SAFE_DIR"),
            confirm("CWE-20", "Improper Input Validation",
                    "the function itself still trusts its argument completely"),
            reject("CWE-59", "Improper Link Resolution Before File Access",
                   "no symlinks are created in the provided context"),
            reject("CWE-36", "Absolute Path Traversal", "slashes are stripped before the call"),
            reject("CWE-23", "Relative Path Traversal", "\"..\" sequences are removed"),
            reject("CWE-367", "Time-of-check Time-of-use Race Condition",
                   "the context shows a single-threaded open-then-read flow"),
            reject("CWE-252", "Unchecked Return Value",
                   "truncation cannot widen access under the stripped name"),
            reject("CWE-476", "NULL Pointer Dereference", "the only caller passes a stack buffer"),
        };
        s.expected = {s.id, 0, 1, 8, 0, 0};
        all.push_back(std::move(s));
    }
    {
        Table2Scenario s;
        s.id = "cwe125";
        s.truth = {"CWE-125"};
        s.tag = eval::SetTag::ContextDependent;
        s.entry_function = "lookup";
        s.function_text =
            R"(int lookup(const int *table, int idx)
{
    return table[idx];
}
)";
        s.project_files = {
            {"main.c",
             R"(#include <stdio.h>

#define TABLE_LEN 32

extern int lookup(const int *table, int idx);

static int codes[TABLE_LEN];

int fetch_code(int idx)
{
    if (idx < 0 || idx >= TABLE_LEN)
        return -1;
    return lookup(codes, idx);
}
)"},
            {"init.c",
             R"(#define TABLE_LEN 32

extern int codes[];

void init_codes(void)
{
    for (int i = 0; i < TABLE_LEN; ++i)
        codes[i] = i * 3;
}
)"},
        };
        s.lister_first = {
            cand("CWE-125", "Out-of-bounds Read", 0.9,
                 "table[idx] is read without any bound check on idx"),
            cand("CWE-787", "Out-of-bounds Write", 0.8,
                 "callers could misuse the returned offset for writes"),
            cand("CWE-129", "Improper Validation of Array Index", 0.7,
                 "idx is used as an array index without validation"),
            cand("CWE-20", "Improper Input Validation", 0.6,
                 "no validation of idx inside the function"),
            cand("CWE-190", "Integer Overflow or Wraparound", 0.5,
                 "idx arithmetic at call sites could wrap"),
            cand("CWE-193", "Off-by-one Error", 0.4,
                 "an inclusive bound at a call site would read one past the end"),
            cand("CWE-476", "NULL Pointer Dereference", 0.3,
                 "table may be null"),
        };
        s.lister_final = s.lister_first;
        s.raw_questions = {
            {"I want the calls to the function lookup",
             "bounds may be enforced at the call sites"},
            {"How is the idx argument checked against the table size before lookup",
             "a range check outside the function would prevent the out-of-bounds read"},
        };
        s.answers = {
            "lookup is called only from fetch_code, which rejects negative indexes and indexes "
            "at or above TABLE_LEN. The index is sanitized according to the array size before "
            "calling the function.",
            "fetch_code enforces 0 <= idx < TABLE_LEN where TABLE_LEN is the exact length of the "
            "codes array passed to lookup.",
        };
        s.decisions = {
            reject("CWE-125", "Out-of-bounds Read",
                   "the index is sanitized according to the array size before calling the function"),
            reject("CWE-787", "Out-of-bounds Write", "no write path exists through lookup"),
            confirm("CWE-129", "Improper Validation of Array Index",
                    "the function itself performs no index validation and is exported"),
            reject("CWE-20", "Improper Input Validation", "the caller performs the range check"),
            reject("CWE-190", "Integer Overflow or Wraparound",
                   "no arithmetic happens before the range check"),
            reject("CWE-193", "Off-by-one Error", "the caller's bound is exclusive"),
            reject("CWE-476", "NULL Pointer Dereference", "the only caller passes a static array"),
        };
        s.expected = {s.id, 0, 1, 6, 0, 0};
        all.push_back(std::move(s));
    }

    // -----------------------------------------------------------------
    // Set 2: the weakness is inherent; context cannot dismiss it.
    // -----------------------------------------------------------------
    {
        Table2Scenario s;
        s.id = "cwe121";
        s.truth = {"CWE-121"};
        s.tag = eval::SetTag::ContextIndependent;
        s.entry_function = "load_record";
        s.function_text =
            R"(void load_record(const struct record *rec)
{
    char buf[64];
    memcpy(buf, rec->data, rec->len);
    archive(buf, rec->len);
}
)";
        s.project_files = {
            {"main.c",
             R"(#include <stdio.h>
#include <string.h>

struct record {
    unsigned int len;
    char data[512];
};

extern void load_record(const struct record *rec);

int consume_stream(FILE *fp)
{
    struct record rec;
    if (fread(&rec.len, sizeof(rec.len), 1, fp) != 1)
        return -1;
    if (fread(rec.data, 1, rec.len > 512 ? 512 : rec.len, fp) == 0)
        return -1;
    load_record(&rec);
    return 0;
}
)"},
            {"archive.c",
             R"(#include <stdio.h>

void archive(const char *buf, unsigned int len)
{
    FILE *out = fopen("archive.bin", "ab");
    if (!out)
        return;
    fwrite(buf, 1, len, out);
    fclose(out);
}
)"},
        };
        // two debate iterations: the reviewer flags two missing CWEs
        s.lister_first = {
            cand("CWE-121", "Stack-based Buffer Overflow", 0.9,
                 "memcpy writes rec->len bytes into the 64-byte stack buffer buf"),
            cand("CWE-787", "Out-of-bounds Write", 0.8,
                 "rec->len may exceed sizeof(buf)"),
            cand("CWE-120", "Buffer Copy without Checking Size of Input", 0.7,
                 "no comparison between rec->len and the destination size"),
            cand("CWE-20", "Improper Input Validation", 0.6,
                 "rec->len comes from an untrusted structure"),
            cand("CWE-190", "Integer Overflow or Wraparound", 0.5,
                 "len arithmetic at call sites could wrap"),
            cand("CWE-128", "Wrap-around Error", 0.4,
                 "an unsigned len near the maximum wraps in later arithmetic"),
        };
        s.lister_final = s.lister_first;
        s.lister_final.push_back(cand("CWE-131", "Incorrect Calculation of Buffer Size", 0.35,
                                      "the fixed 64-byte buffer ignores the record length"));
        s.lister_final.push_back(cand("CWE-676", "Use of Potentially Dangerous Function", 0.3,
                                      "raw memcpy with an attacker-influenced length"));
        s.reviewer_missing = {
            {"CWE-131", "Incorrect Calculation of Buffer Size",
             "the destination size is fixed while the copy length is external"},
            {"CWE-676", "Use of Potentially Dangerous Function",
             "memcpy with an unvalidated length is itself a dangerous pattern"},
        };
        s.raw_questions = {
            {"I want the calls to the function load_record",
             "the caller may bound rec->len before the call"},
            {"Is the len attribute of struct record validated anywhere",
             "without control over that attribute the overflow is real"},
        };
        s.answers = {
            "load_record is called from consume_stream, which reads rec.len straight from a "
            "file stream. The read clamps how many data bytes are fetched, but passes the raw "
            "len to load_record with no control over that attribute.",
            "No function validates rec->len against 64. The structure allows up to 512 data "
            "bytes while buf holds 64, so a stream with len > 64 overflows the stack buffer.",
        };
        s.decisions = {
            confirm("CWE-121", "Stack-based Buffer Overflow",
                    "no control over that attribute; len up to 512 overruns the 64-byte buffer"),
            confirm("CWE-787", "Out-of-bounds Write",
                    "the overflow writes past buf on the stack"),
            confirm("CWE-120", "Buffer Copy without Checking Size of Input",
                    "no size comparison exists anywhere on the path"),
            reject("CWE-20", "Improper Input Validation",
                   "subsumed by the confirmed overflow findings in this program"),
            reject("CWE-190", "Integer Overflow or Wraparound",
                   "no arithmetic is performed on len before the copy"),
            reject("CWE-128", "Wrap-around Error", "len is bounded by the 512-byte field"),
            reject("CWE-131", "Incorrect Calculation of Buffer Size",
                   "the buffer size is a constant, not a miscalculation"),
            reject("CWE-676", "Use of Potentially Dangerous Function",
                   "the dangerous call is already captured by the overflow findings"),
        };
        s.expected = {s.id, 1, 2, 5, 0, 0};
        all.push_back(std::move(s));
    }
    {
        Table2Scenario s;
        s.id = "cwe190";
        s.truth = {"CWE-190"};
        s.tag = eval::SetTag::ContextIndependent;
        s.entry_function = "alloc_items";
        s.function_text =
            R"(struct item *alloc_items(FILE *fp)
{
    unsigned int n = 0;
    fscanf(fp, "%u", &n);
    return malloc(n * sizeof(struct item));
}
)";
        s.project_files = {
            {"main.c",
             R"(#include <stdio.h>
#include <stdlib.h>

struct item {
    int id;
    char name[60];
};

extern struct item *alloc_items(FILE *fp);

int load_config(const char *path)
{
    FILE *fp = fopen(path, "r");
    if (!fp)
        return -1;
    struct item *items = alloc_items(fp);
    fclose(fp);
    return items ? 0 : -1;
}
)"},
            {"config.c",
             R"(#include <stdio.h>

const char *config_path(void)
{
    return "/etc/app/items.conf";
}

int config_is_user_writable(void)
{
    return 1;
}
)"},
        };
        s.lister_first = {
            cand("CWE-190", "Integer Overflow or Wraparound", 0.9,
                 "n * sizeof(struct item) can wrap for large n"),
            cand("CWE-789", "Memory Allocation with Excessive Size Value", 0.8,
                 "n is read from the file without an upper bound"),
            cand("CWE-20", "Improper Input Validation", 0.75,
                 "the scanned value is used without any verification"),
            cand("CWE-400", "Uncontrolled Resource Consumption", 0.6,
                 "a huge n allocates unbounded memory"),
            cand("CWE-131", "Incorrect Calculation of Buffer Size", 0.55,
                 "the wrapped product yields a too-small allocation"),
            cand("CWE-680", "Integer Overflow to Buffer Overflow", 0.5,
                 "later writes into the undersized block overflow it"),
            cand("CWE-128", "Wrap-around Error", 0.4,
                 "unsigned multiplication wraps silently"),
            cand("CWE-252", "Unchecked Return Value", 0.3,
                 "the fscanf result is ignored"),
            cand("CWE-476", "NULL Pointer Dereference", 0.2,
                 "callers may use the result without a null check"),
        };
        s.lister_final = s.lister_first;
        s.raw_questions = {
            {"I want the calls to the function alloc_items",
             "whether fp is attacker-reachable decides exploitability"},
            {"Can users influence the file that alloc_items reads the count from",
             "a trusted file would reduce the impact of the unchecked multiplication"},
        };
        s.answers = {
            "alloc_items is called from load_config with a file opened from config_path(). The "
            "configuration file is user writable, so users can have access to the file fp "
            "through a configuration file.",
            "config_is_user_writable() returns true for /etc/app/items.conf; any local user can "
            "write an arbitrary count into the file consumed by alloc_items.",
        };
        s.decisions = {
            confirm("CWE-190", "Integer Overflow or Wraparound",
                    "users control the on-disk count, so the multiplication can be made to wrap"),
            confirm("CWE-789", "Memory Allocation with Excessive Size Value",
                    "an attacker-chosen n drives the allocation size directly"),
            reject("CWE-20", "Improper Input Validation",
                   "covered by the confirmed overflow finding for this program"),
            reject("CWE-400", "Uncontrolled Resource Consumption",
                   "allocation failure is handled by the caller returning -1"),
            reject("CWE-131", "Incorrect Calculation of Buffer Size",
                   "the calculation itself is conventional; the wrap is the root cause"),
            reject("CWE-680", "Integer Overflow to Buffer Overflow",
                   "no subsequent writes into the block exist in the provided context"),
            reject("CWE-128", "Wrap-around Error", "duplicate of the confirmed wraparound"),
            reject("CWE-252", "Unchecked Return Value",
                   "an unparsed count leaves n zero, which allocates nothing"),
            reject("CWE-476", "NULL Pointer Dereference", "load_config checks the result"),
        };
        s.expected = {s.id, 1, 1, 7, 0, 0};
        all.push_back(std::move(s));
    }
    {
        Table2Scenario s;
        s.id = "cwe415";
        s.truth = {"CWE-415"};
        s.tag = eval::SetTag::ContextIndependent;
        s.entry_function = "teardown";
        s.function_text =
            R"(void teardown(struct conn *c, int flush)
{
    if (flush) {
        drain(c);
        free(c->buf);
    }
    free(c->buf);
    free(c);
}
)";
        s.project_files = {
            {"main.c",
             R"(#include <stdlib.h>

struct conn {
    char *buf;
    int fd;
};

extern void teardown(struct conn *c, int flush);

void close_all(struct conn **conns, int count)
{
    for (int i = 0; i < count; ++i)
        teardown(conns[i], 1);
}
)"},
            {"drain.c",
             R"(struct conn;

void drain(struct conn *c)
{
    (void)c;
}
)"},
        };
        // the true CWE-415 is never listed; the debate misses it entirely
        s.lister_first = {
            cand("CWE-416", "Use After Free", 0.85,
                 "c->buf is used by drain after a potential earlier free in callers"),
            cand("CWE-476", "NULL Pointer Dereference", 0.8,
                 "c and c->buf are dereferenced without null checks"),
            cand("CWE-401", "Missing Release of Memory after Effective Lifetime", 0.7,
                 "error paths may skip the frees"),
            cand("CWE-590", "Free of Memory not on the Heap", 0.6,
                 "callers could pass stack-allocated conn objects"),
            cand("CWE-762", "Mismatched Memory Management Routines", 0.5,
                 "buf may originate from a non-malloc allocator"),
            cand("CWE-20", "Improper Input Validation", 0.4,
                 "flush is trusted without validation"),
            cand("CWE-763", "Release of Invalid Pointer or Reference", 0.35,
                 "c may not point to an allocated object"),
            cand("CWE-252", "Unchecked Return Value", 0.3,
                 "drain's effect is ignored"),
            cand("CWE-686", "Function Call With Incorrect Argument Type", 0.2,
                 "an integer flag used as a boolean may hide caller mistakes"),
        };
        s.lister_final = s.lister_first;
        s.raw_questions = {
            {"I want the calls to the function teardown",
             "the flush flag value at call sites decides which paths execute"},
            {"Where is the buf member of struct conn allocated and freed",
             "ownership determines the lifetime findings"},
        };
        s.answers = {
            "teardown is called from close_all with flush always 1, so the flush branch executes "
            "on every call. No external context invalidate this weakness.",
            "buf is allocated by connection setup elsewhere and freed only inside teardown; no "
            "other function frees it.",
        };
        s.decisions = {
            confirm("CWE-416", "Use After Free",
                    "with flush set, drain runs between operations on a buffer that teardown then "
                    "frees twice; the second free operates on a dangling pointer"),
            reject("CWE-476", "NULL Pointer Dereference",
                   "close_all only passes live connections"),
            reject("CWE-401", "Missing Release of Memory after Effective Lifetime",
                   "both members are freed on every path"),
            reject("CWE-590", "Free of Memory not on the Heap",
                   "all conn objects in the context are heap-allocated"),
            reject("CWE-762", "Mismatched Memory Management Routines",
                   "buf comes from malloc in the setup code"),
            reject("CWE-20", "Improper Input Validation", "flush is a constant at the call site"),
            reject("CWE-763", "Release of Invalid Pointer or Reference",
                   "pointers originate from the allocator"),
            reject("CWE-252", "Unchecked Return Value", "drain returns nothing"),
            reject("CWE-686", "Function Call With Incorrect Argument Type",
                   "the flag is used consistently"),
        };
        s.expected = {s.id, 0, 1, 8, 1, 1};
        all.push_back(std::move(s));
    }
    {
        Table2Scenario s;
        s.id = "cwe377";
        s.truth = {"CWE-377"};
        s.tag = eval::SetTag::ContextIndependent;
        s.entry_function = "make_temp_report";
        s.function_text =
            R"(FILE *make_temp_report(void)
{
    char *name = tmpnam(NULL);
    if (!name)
        return NULL;
    return fopen(name, "w");
}
)";
        s.project_files = {
            {"main.c",
             R"(#include <stdio.h>

extern FILE *make_temp_report(void);

int write_report(const char *body)
{
    FILE *f = make_temp_report();
    if (!f)
        return -1;
    fputs(body, f);
    fclose(f);
    return 0;
}
)"},
            {"report.c",
             R"(#include <stdio.h>

int report_enabled(void)
{
    return 1;
}
)"},
        };
        s.lister_first = {
            cand("CWE-377", "Insecure Temporary File", 0.9,
                 "tmpnam followed by fopen leaves a window between name generation and creation"),
            cand("CWE-367", "Time-of-check Time-of-use Race Condition", 0.8,
                 "an attacker can create the file between tmpnam and fopen"),
            cand("CWE-59", "Improper Link Resolution Before File Access", 0.7,
                 "a symlink planted at the predicted name redirects the write"),
            cand("CWE-362", "Concurrent Execution using Shared Resource with Improper Synchronization",
                 0.6, "the temp directory is shared among processes"),
            cand("CWE-378", "Creation of Temporary File With Insecure Permissions", 0.5,
                 "fopen applies default permissions"),
            cand("CWE-732", "Incorrect Permission Assignment for Critical Resource", 0.4,
                 "the report may be world-readable"),
            cand("CWE-20", "Improper Input Validation", 0.3,
                 "the generated name is trusted blindly"),
        };
        s.lister_final = s.lister_first;
        s.raw_questions = {
            {"I want the calls to the function make_temp_report",
             "callers may serialize access or confine the directory"},
            {"Does any code create the temporary file atomically or pre-create it safely",
             "an atomic creation elsewhere would close the race window"},
        };
        s.answers = {
            "make_temp_report is called from write_report and nothing else. No locking or safe "
            "pre-creation exists; no external context invalidate this weakness.",
            "No code uses mkstemp or opens with exclusive-create flags. The name from tmpnam is "
            "reused as-is by fopen(\"w\").",
        };
        s.decisions = {
            confirm("CWE-377", "Insecure Temporary File",
                    "no external context invalidate this weakness; the race window between "
                    "filename generation and file creation remains"),
            confirm("CWE-367", "Time-of-check Time-of-use Race Condition",
                    "the tmpnam-then-fopen pair is exactly a check-use race an attacker can win"),
            reject("CWE-59", "Improper Link Resolution Before File Access",
                   "captured by the confirmed temp-file race in this program"),
            reject("CWE-362",
                   "Concurrent Execution using Shared Resource with Improper Synchronization",
                   "single-process context given; the cross-process race is already confirmed"),
            reject("CWE-378", "Creation of Temporary File With Insecure Permissions",
                   "permissions are the process umask default in this context"),
            reject("CWE-732", "Incorrect Permission Assignment for Critical Resource",
                   "the report content is not sensitive in the provided program"),
            reject("CWE-20", "Improper Input Validation", "no external input reaches the function"),
        };
        s.expected = {s.id, 1, 1, 5, 0, 0};
        all.push_back(std::move(s));
    }
    {
        Table2Scenario s;
        s.id = "cwe259_798";
        s.truth = {"CWE-259", "CWE-798"};
        s.tag = eval::SetTag::ContextIndependent;
        s.entry_function = "authenticate";
        s.function_text =
            R"(int authenticate(const char *user, const char *pass)
{
    if (strcmp(user, "admin") == 0 && strcmp(pass, "S3cr3tP@ss!") == 0)
        return 1;
    return 0;
}
)";
        s.project_files = {
            {"main.c",
             R"(#include <stdio.h>
#include <string.h>

extern int authenticate(const char *user, const char *pass);

int login(void)
{
    char user[64];
    char pass[64];
    if (scanf("%63s %63s", user, pass) != 2)
        return 0;
    return authenticate(user, pass);
}
)"},
            {"session.c",
             R"(extern int login(void);

int open_session(void)
{
    if (!login())
        return -1;
    return 42;
}
)"},
        };
        // the lister reports the hard-coded credential pair as one compound id
        s.lister_first = {
            cand("CWE-259/798", "Use of Hard-coded Password / Hard-coded Credentials", 0.95,
                 "the literal \"S3cr3tP@ss!\" and user \"admin\" are compiled into the binary and "
                 "can be reverse engineered"),
            cand("CWE-287", "Improper Authentication", 0.8,
                 "a single static credential pair gates authentication"),
            cand("CWE-522", "Insufficiently Protected Credentials", 0.7,
                 "the password is stored in plain text in the code"),
            cand("CWE-321", "Use of Hard-coded Cryptographic Key", 0.6,
                 "the literal may double as a key elsewhere"),
            cand("CWE-327", "Use of a Broken or Risky Cryptographic Algorithm", 0.5,
                 "plain strcmp comparison instead of a hash"),
            cand("CWE-311", "Missing Encryption of Sensitive Data", 0.45,
                 "credentials are processed unencrypted"),
            cand("CWE-200", "Exposure of Sensitive Information to an Unauthorized Actor", 0.4,
                 "strings output of the binary reveals the password"),
            cand("CWE-547", "Use of Hard-coded, Security-relevant Constants", 0.3,
                 "the admin username is a security-relevant constant"),
            cand("CWE-615", "Inclusion of Sensitive Information in Source Code Comments", 0.2,
                 "nearby comments may reference the credentials"),
        };
        s.lister_final = s.lister_first;
        s.raw_questions = {
            {"I want the calls to the function authenticate",
             "alternate credential sources would change the verdict"},
            {"Is the password compared by authenticate loaded from configuration anywhere",
             "a config-loaded secret would not be hard-coded"},
        };
        s.answers = {
            "authenticate is called only from login, which reads user and pass from stdin and "
            "compares them against the embedded literals. No external context invalidate this "
            "weakness.",
            "No configuration loading exists; the only credential source is the string literal "
            "in authenticate itself.",
        };
        s.decisions = {
            // the auditor echoes the compound id; the parser fans it out
            confirm("CWE-259/798", "Use of Hard-coded Password / Hard-coded Credentials",
                    "no external context invalidate this weakness; the credentials are embedded "
                    "literals recoverable from the binary"),
            confirm("CWE-287", "Improper Authentication",
                    "authentication reduces to one reversible string comparison"),
            reject("CWE-522", "Insufficiently Protected Credentials",
                   "folded into the confirmed hard-coded credential findings"),
            reject("CWE-321", "Use of Hard-coded Cryptographic Key",
                   "the literal is used only as a password, not a key"),
            reject("CWE-327", "Use of a Broken or Risky Cryptographic Algorithm",
                   "no cryptographic algorithm is involved"),
            reject("CWE-311", "Missing Encryption of Sensitive Data",
                   "no transport or storage of credentials occurs in the context"),
            reject("CWE-200", "Exposure of Sensitive Information to an Unauthorized Actor",
                   "exposure is a consequence of the confirmed hard-coded credentials"),
            reject("CWE-547", "Use of Hard-coded, Security-relevant Constants",
                   "duplicate of the confirmed findings"),
            reject("CWE-615", "Inclusion of Sensitive Information in Source Code Comments",
                   "the provided sources contain no such comments"),
        };
        s.expected = {s.id, 2, 1, 7, 0, 0};
        all.push_back(std::move(s));
    }

    return all;
}

} // namespace

const std::vector<Table2Scenario>& table2_scenarios() {
    static const std::vector<Table2Scenario> scenarios = build_scenarios();
    return scenarios;
}

ScriptedAgentProvider make_scenario_provider(const Table2Scenario& scenario) {
    ScriptedAgentProvider provider;
    provider.lister.push_back(lister_response(scenario.lister_first));
    if (!scenario.reviewer_missing.empty()) {
        provider.reviewer.push_back(reviewer_reject(scenario.reviewer_missing));
        provider.lister.push_back(lister_response(scenario.lister_final));
    }
    provider.reviewer.push_back(reviewer_approve());

    // extractor calls happen in ranked candidate order
    auto ranked = agents::parse_lister(lister_response(scenario.lister_final), nullptr);
    rank_candidates(ranked);
    for (const auto& cand : ranked) {
        std::string context;
        if (scenario.id == "cwe120" && cand.cwe_id == "CWE-120") {
            context = "Environment or conditions under which 'internal_copy' is used";
        } else {
            context = "Callers of " + scenario.entry_function +
                      " and any checks performed before the call, relevant to " + cand.cwe_id;
        }
        provider.extractor.push_back(extractor_response(
            cand.cwe_id, {{context, false, "High",
                           "the verdict for " + cand.cwe_id + " depends on the call sites"}}));
    }

    provider.query.push_back(query_response(scenario.raw_questions));
    for (const auto& answer : scenario.answers) provider.synthesizer.push_back(answer);
    provider.auditor.push_back(auditor_response(scenario.decisions));
    return provider;
}

void write_program_files(const Table2Scenario& scenario, const std::string& dir) {
    std::filesystem::create_directories(dir);
    for (const auto& [rel, content] : scenario.project_files) {
        std::filesystem::path path = std::filesystem::path(dir) / rel;
        std::filesystem::create_directories(path.parent_path());
        util::write_file(path.string(), content);
    }
}

std::string scenario_dataset_line(const Table2Scenario& scenario) {
    util::ordered_json rec;
    rec["id"] = scenario.id;
    rec["function"] = scenario.function_text;
    rec["cwes"] = scenario.truth;
    rec["project_root"] = "programs/" + scenario.id;
    rec["set_tag"] = scenario.tag == eval::SetTag::ContextDependent ? "CONTEXT_DEPENDENT"
                                                                    : "CONTEXT_INDEPENDENT";
    return rec.dump();
}

} // namespace cwescout::testing
