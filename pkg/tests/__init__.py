# SPDX-FileCopyrightText: 2024-present JoseMariaGarciaMarquez <josemariagarciamarquez2.72@gmail.com>
#
# SPDX-License-Identifier: MIT
