# -*- encoding: utf-8 -*-
"""Test "onebatchpam" package.
"""
