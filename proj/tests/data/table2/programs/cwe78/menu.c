#include <stdio.h>

int read_menu_choice(void)
{
    int choice = 0;
    if (scanf("%d", &choice) != 1)
        return 0;
    return choice;
}
