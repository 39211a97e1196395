#include <stdio.h>

int publish(const char *slot)
{
    fputs(slot, stdout);
    fputc('\n', stdout);
    return 0;
}
