# SPDX-FileCopyrightText: 2024-present JoseMariaGarciaMarquez <josemariagarciamarquez2.72@gmail.com>
#
# SPDX-License-Identifier: MIT
__version__ = "0.1.0"
