# -*- encoding: utf-8 -*-
"""Shorthand for 'onebatchpam.cli'
"""

if __name__ == "__main__":
    from onebatchpam.cli import sys_main
    sys_main()
